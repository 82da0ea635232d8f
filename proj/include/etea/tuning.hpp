#ifndef ETEA_TUNING_HPP
#define ETEA_TUNING_HPP

// Regularization-parameter selection and optimality diagnostics.
//
// At a minimizer x* the vector p = 2 G^T H^T H (y - x*) satisfies
// p(n) = lambda * phi_eps'([R x*]_n), hence |p(n)| < lambda. On pure noise
// the solution should vanish, so lambda is set from the spread of
// 2 G^T H^T H w: lambda = 2.5 sigma_w ||2 h||_2, h being the impulse response
// of H^2(z)/R(z) (order 1) or H^2(z)/R2(z) (order 2).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "etea/error.hpp"
#include "etea/filter.hpp"
#include "etea/operator.hpp"
#include "etea/penalty.hpp"
#include "etea/solver.hpp"

namespace etea {

inline constexpr double kDefaultLambdaMultiplier = 2.5;
inline constexpr double kDefaultOptimalityTolerance = 1e-6;

/// max(4096, ceil(20 / (1 - r))).
inline std::size_t default_response_length(const SparsifyingOperator& op) {
  const double r = op.rate();
  if (r >= 1.0) throw ParameterError("impulse response of 1/R(z) does not decay for r = 1");
  return std::max<std::size_t>(4096, static_cast<std::size_t>(std::ceil(20.0 / (1.0 - r))));
}

/// lambda = multiplier * sigma_w * ||2 h||_2. With n == 0 the response
/// length starts at default_response_length() and doubles until the
/// response has decayed; an explicit n is used as given.
inline double select_lambda(double sigma_w, const ZeroPhaseFilter& filter, const SparsifyingOperator& op,
                            std::size_t n = 0, double multiplier = kDefaultLambdaMultiplier) {
  if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w)) throw ParameterError("noise sigma must be >= 0");
  std::vector<double> h;
  if (n != 0) {
    h = impulse_response_cascade(filter, op, n);
  } else {
    constexpr std::size_t max_length = std::size_t{1} << 22;
    for (n = default_response_length(op);; n *= 2) {
      try {
        h = impulse_response_cascade(filter, op, n);
        break;
      } catch (const ResponseTooShort&) {
        if (n >= max_length) throw;
      }
    }
  }
  double energy = 0.0;
  for (double v : h) energy += v * v;
  return multiplier * sigma_w * 2.0 * std::sqrt(energy);
}

/// Robust noise level from first differences: median|dy| / (0.6745 sqrt 2).
/// Differencing suppresses a slowly varying baseline.
inline double estimate_sigma(std::span<const double> y, const ZeroPhaseFilter& filter) {
  if (y.size() < 2 * static_cast<std::size_t>(filter.order()) + 3)
    throw DimensionError("signal too short to estimate the noise level");
  std::vector<double> diff(y.size() - 1);
  for (std::size_t i = 0; i + 1 < y.size(); ++i) diff[i] = std::abs(y[i + 1] - y[i]);
  const std::size_t mid = diff.size() / 2;
  std::nth_element(diff.begin(), diff.begin() + static_cast<std::ptrdiff_t>(mid), diff.end());
  double median = diff[mid];
  if (diff.size() % 2 == 0) {
    const double lower = *std::max_element(diff.begin(), diff.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  return median / (0.6745 * std::numbers::sqrt2);
}

struct OptimalityReport {
  std::vector<double> p;  ///< 2 G^T H^T H (y - x*)
  std::vector<double> v;  ///< R x*
  double lambda = 0.0;
  double max_abs_p = 0.0;
  std::size_t violation_count = 0;  ///< entries with |p| > lambda (1 + tol_opt)
};

inline OptimalityReport optimality_report(std::span<const double> y, std::span<const double> x_star,
                                          const SolverConfig& cfg,
                                          double tol_opt = kDefaultOptimalityTolerance) {
  if (y.size() != x_star.size()) throw DimensionError("optimality report: length mismatch");
  const auto hp = cfg.filter.at_length(y.size());
  auto e = detail::subtract(y, x_star);
  auto p = cfg.op.apply_inverse_adjoint(hp.apply_transpose(hp.apply(e)));
  for (double& v : p) v *= 2.0;

  OptimalityReport rep;
  rep.v = cfg.op.apply(x_star);
  rep.lambda = cfg.lambda;
  rep.max_abs_p = detail::max_abs(p);
  const double bound = cfg.lambda * (1.0 + tol_opt);
  rep.violation_count = static_cast<std::size_t>(
      std::count_if(p.begin(), p.end(), [bound](double v) { return std::abs(v) > bound; }));
  rep.p = std::move(p);
  return rep;
}

/// Violations restricted to entries at least `edge` samples from either end.
inline std::size_t interior_violations(const OptimalityReport& rep, double tol_opt, std::size_t edge) {
  const double bound = rep.lambda * (1.0 + tol_opt);
  std::size_t count = 0;
  for (std::size_t n = edge; n + edge < rep.p.size(); ++n)
    if (std::abs(rep.p[n]) > bound) ++count;
  return count;
}

} // namespace etea

#endif // ETEA_TUNING_HPP
