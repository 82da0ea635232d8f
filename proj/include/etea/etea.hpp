#ifndef ETEA_ETEA_HPP
#define ETEA_ETEA_HPP

#include "etea/banded.hpp"
#include "etea/error.hpp"
#include "etea/filter.hpp"
#include "etea/operator.hpp"
#include "etea/penalty.hpp"
#include "etea/solver.hpp"
#include "etea/synth.hpp"
#include "etea/tuning.hpp"

#endif // ETEA_ETEA_HPP
