#ifndef ETEA_PENALTY_HPP
#define ETEA_PENALTY_HPP

// Sparsity-promoting penalties and their smoothed forms.
//
//   phi(u)      abs:  |u|
//               log:  log(1 + a|u|) / a
//               atan: 2/(a sqrt3) * (atan((1 + 2a|u|)/sqrt3) - pi/6)
//   phi_eps(u) = phi(rho(u)),  rho(u) = sqrt(u^2 + eps)
//   psi(v)     = v / phi_eps'(v) = rho / phi'(rho)
//
// The quadratic g_eps(u, v) = u^2 / (2 psi(v)) + phi_eps(v) - (v/2) phi_eps'(v)
// majorizes phi_eps in u and touches it at u = v.

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "etea/error.hpp"

namespace etea {

enum class PenaltyKind { abs, log, atan };

inline std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
  case PenaltyKind::abs: return "abs";
  case PenaltyKind::log: return "log";
  case PenaltyKind::atan: return "atan";
  }
  return "?";
}

inline std::optional<PenaltyKind> parse_penalty_kind(std::string_view name) {
  if (name == "abs") return PenaltyKind::abs;
  if (name == "log") return PenaltyKind::log;
  if (name == "atan") return PenaltyKind::atan;
  return std::nullopt;
}

inline constexpr double kDefaultSmoothing = 1e-10;

/// Penalty descriptor. `a` is the shape parameter of log/atan (ignored by
/// abs); `eps` the smoothing parameter. Large `a` makes log/atan strongly
/// non-convex and the overall objective may then have local minima.
struct Penalty {
  PenaltyKind kind = PenaltyKind::abs;
  double a = 1.0;
  double eps = kDefaultSmoothing;

  void validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("penalty: shape parameter a must be > 0");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ParameterError("penalty: smoothing eps must be > 0");
  }
};

inline Penalty make_penalty(PenaltyKind kind, double a = 1.0, double eps = kDefaultSmoothing) {
  Penalty p{kind, a, eps};
  p.validate();
  return p;
}

/// Non-smooth phi(u).
inline double phi(const Penalty& p, double u) {
  const double t = std::abs(u);
  switch (p.kind) {
  case PenaltyKind::abs: return t;
  case PenaltyKind::log: return std::log1p(p.a * t) / p.a;
  case PenaltyKind::atan: {
    constexpr double s3 = std::numbers::sqrt3;
    return 2.0 / (p.a * s3) * (std::atan((1.0 + 2.0 * p.a * t) / s3) - std::numbers::pi / 6.0);
  }
  }
  return 0.0;
}

/// phi'(t) for t > 0.
inline double dphi(const Penalty& p, double t) {
  switch (p.kind) {
  case PenaltyKind::abs: return 1.0;
  case PenaltyKind::log: return 1.0 / (1.0 + p.a * t);
  case PenaltyKind::atan: return 1.0 / (1.0 + p.a * t + p.a * p.a * t * t);
  }
  return 0.0;
}

inline double smoothed_magnitude(const Penalty& p, double u) { return std::sqrt(u * u + p.eps); }

inline double phi_eps(const Penalty& p, double u) { return phi(p, smoothed_magnitude(p, u)); }

inline double dphi_eps(const Penalty& p, double u) {
  const double rho = smoothed_magnitude(p, u);
  return u / rho * dphi(p, rho);
}

/// Closed forms; never evaluated as the quotient v / phi_eps'(v).
inline double psi(const Penalty& p, double v) {
  const double rho = smoothed_magnitude(p, v);
  switch (p.kind) {
  case PenaltyKind::abs: return rho;
  case PenaltyKind::log: return rho * (1.0 + p.a * rho);
  case PenaltyKind::atan: return rho * (1.0 + p.a * rho + p.a * p.a * rho * rho);
  }
  return rho;
}

inline double majorizer(const Penalty& p, double u, double v) {
  return u * u / (2.0 * psi(p, v)) + phi_eps(p, v) - 0.5 * v * dphi_eps(p, v);
}

} // namespace etea

#endif // ETEA_PENALTY_HPP
