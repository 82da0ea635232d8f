#ifndef ETEA_SOLVER_HPP
#define ETEA_SOLVER_HPP

// Majorization-minimization solver for
//
//   minimize_x  || H (y - x) ||^2 + lambda * sum_n phi_eps([R x]_n)
//
// with H = B A^-1 a zero-phase highpass and R a first- or second-order
// sparsifying operator. Each iteration majorizes the penalty by the quadratic
// g_eps, giving the update
//
//   Lambda = diag(lambda / (2 psi(R x_k)))
//   Q      = B^T B + A^T R^T Lambda R A        (banded, bandwidth 2d + order)
//   x_k+1  = A Q^-1 b,   b = B^T B A^-1 y
//
// and the cost never increases. The baseline is f = (y - x) - H (y - x).
//
// Substituting x = A z squares the conditioning of A into Q, and A is close
// to singular at low frequencies when fc is small. Q is therefore assembled
// and factored in extended precision, and the update is polished by a few
// rounds of iterative refinement on the equivalent x-space system
//
//   (H^T H + R^T Lambda R) x = H^T H y,
//
// whose residual is evaluated matrix-free with the factored A. Each round
// reuses the factorization: dx = A Q^-1 A g.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "etea/banded.hpp"
#include "etea/error.hpp"
#include "etea/filter.hpp"
#include "etea/operator.hpp"
#include "etea/penalty.hpp"

namespace etea {

enum class Initialization {
  from_observation,  ///< x0 = y
  zeros,             ///< x0 = 0
};

struct SolverConfig {
  double lambda = 1.0;
  int max_iter = 50;
  /// Stop when max|x_k+1 - x_k| / max(1, max|x_k|) < tol.
  double tol = 1e-8;
  Initialization init = Initialization::from_observation;
  Penalty penalty{};
  SparsifyingOperator op{1, 0.94};
  ZeroPhaseFilter filter = ZeroPhaseFilter::design(1, 0.013);

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda must be > 0");
    if (max_iter < 1) throw ParameterError("max_iter must be >= 1");
    if (!(tol > 0.0)) throw ParameterError("tol must be > 0");
    penalty.validate();
  }

  /// Shortest signal the solver accepts.
  std::size_t min_length() const noexcept {
    return 2 * static_cast<std::size_t>(filter.order()) + static_cast<std::size_t>(op.order()) + 3;
  }
};

struct Decomposition {
  std::vector<double> x;         ///< transient component
  std::vector<double> f;         ///< lowpass baseline
  std::vector<double> residual;  ///< H (y - x), the noise estimate
  /// Objective at x0 followed by its value after every iteration, so
  /// cost_history.size() == iterations + 1.
  std::vector<double> cost_history;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline std::vector<double> subtract(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

} // namespace detail

/// One observation bound to one configuration. Holds the length-dependent
/// banded matrices so that repeated steps reuse them.
class MmProblem {
public:
  MmProblem(std::span<const double> y, SolverConfig cfg)
      : y_(y.begin(), y.end()), cfg_(std::move(cfg)), hp_(make_highpass(y.size(), cfg_)) {
    cfg_.validate();
    for (double v : y_)
      if (!std::isfinite(v)) throw ParameterError("observation contains non-finite samples");
    const std::size_t n = y_.size();
    r_ = cfg_.op.as_banded(n);
    r_t_ = transpose(r_);
    a_ext_ = hp_.a().cast<Extended>();
    const auto b_ext = hp_.b().cast<Extended>();
    ra_ext_ = multiply(r_.cast<Extended>(), a_ext_);
    ra_t_ext_ = transpose(ra_ext_);
    btb_ext_ = multiply(transpose(b_ext), b_ext);
    b_ = multiply(multiply(transpose(hp_.b()), hp_.b()), hp_.solve_a(y_));
  }

  std::size_t size() const noexcept { return y_.size(); }
  const SolverConfig& config() const noexcept { return cfg_; }
  std::span<const double> observation() const noexcept { return y_; }
  const HighpassMatrices& highpass() const noexcept { return hp_; }

  /// b = B^T B A^-1 y.
  const std::vector<double>& rhs() const noexcept { return b_; }

  double cost(std::span<const double> x) const {
    check(x);
    const auto hr = hp_.apply(detail::subtract(y_, x));
    double data = 0.0;
    for (double e : hr) data += e * e;
    double reg = 0.0;
    for (double v : cfg_.op.apply(x)) reg += phi_eps(cfg_.penalty, v);
    return data + cfg_.lambda * reg;
  }

  /// Diagonal of Lambda at x: lambda / (2 psi([R x]_n)).
  std::vector<double> weights(std::span<const double> x) const {
    check(x);
    auto w = cfg_.op.apply(x);
    for (double& e : w) e = cfg_.lambda / (2.0 * psi(cfg_.penalty, e));
    return w;
  }

  /// Q = B^T B + (R A)^T Lambda (R A).
  BandedMatrix system_matrix(std::span<const double> x) const {
    return assemble(weights(x)).cast<double>();
  }

  std::vector<double> step(std::span<const double> xk) const { return step(xk, b_); }

  /// MM update from x_k. The direct solve uses b; refinement targets the
  /// observation this problem was built from, so b should be rhs().
  std::vector<double> step(std::span<const double> xk, std::span<const double> b) const {
    if (b.size() != y_.size()) throw DimensionError("mm step: rhs length mismatch");
    const auto w = weights(xk);
    const auto q = factor(assemble(w));
    auto x = to_double(multiply(a_ext_, q.solve(b)));

    const double floor = 1e-14 * std::max(1.0, detail::max_abs(x));
    double previous = std::numeric_limits<double>::infinity();
    for (int round = 0; round < kMaxRefinements; ++round) {
      const auto g = multiply(hp_.a(), gradient(x, w));
      const auto dx = multiply(a_ext_, q.solve(std::span<const double>(g)));
      double size = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] += static_cast<double>(dx[i]);
        size = std::max(size, std::abs(static_cast<double>(dx[i])));
      }
      if (size <= floor || size > 0.5 * previous) break;
      previous = size;
    }
    return safeguard(xk, std::move(x), w);
  }

  Decomposition solve() const {
    Decomposition out;
    std::vector<double> x =
        cfg_.init == Initialization::from_observation ? y_ : std::vector<double>(y_.size(), 0.0);
    out.cost_history.push_back(cost(x));
    for (int k = 0; k < cfg_.max_iter; ++k) {
      auto next = step(x);
      const double change = detail::max_abs(detail::subtract(next, x)) / std::max(1.0, detail::max_abs(x));
      x = std::move(next);
      ++out.iterations;
      out.cost_history.push_back(cost(x));
      if (change < cfg_.tol) {
        out.converged = true;
        break;
      }
    }
    auto e = detail::subtract(y_, x);
    out.residual = hp_.apply(e);
    out.f = detail::subtract(e, out.residual);
    out.x = std::move(x);
    return out;
  }

private:
  using Extended = long double;
  static constexpr int kMaxRefinements = 10;

  BasicBandedMatrix<Extended> assemble(const std::vector<double>& w) const {
    const std::vector<Extended> we(w.begin(), w.end());
    return add(btb_ext_, multiply(ra_t_ext_, scale_rows(we, ra_ext_)));
  }

  // Q is positive definite in exact arithmetic, but with d >= 2, a small
  // cutoff and many near-zero [R x]_n its rounded pivots can turn negative.
  // Retry with a small relative diagonal shift; the shifted factor then only
  // preconditions the refinement below.
  static BasicBandedLDLT<Extended> factor(const BasicBandedMatrix<Extended>& q) {
    try {
      return BasicBandedLDLT<Extended>(q);
    } catch (const NotPositiveDefinite&) {
      for (Extended shift = 1e-16L; shift <= 1e-8L; shift *= 100.0L) {
        auto shifted = q;
        for (std::size_t j = 0; j < q.rows(); ++j) shifted.set(j, j, q(j, j) * (1.0L + shift));
        try {
          return BasicBandedLDLT<Extended>(shifted);
        } catch (const NotPositiveDefinite&) {
        }
      }
      throw;
    }
  }

  // H^T H (y - x) - R^T Lambda R x: half the negative gradient of the
  // majorizer at x.
  std::vector<double> gradient(std::span<const double> x, const std::vector<double>& w) const {
    auto g = hp_.apply_transpose(hp_.apply(detail::subtract(y_, x)));
    auto v = multiply(r_, std::span<const double>(x));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= w[i];
    const auto rv = multiply(r_t_, v);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= rv[i];
    return g;
  }

  // ||H (y - x)||^2 + sum_n w_n [R x]_n^2, the majorizer up to a constant.
  double quadratic(std::span<const double> x, const std::vector<double>& w) const {
    double sum = 0.0;
    for (double e : hp_.apply(detail::subtract(y_, x))) sum += e * e;
    const auto v = multiply(r_, x);
    for (std::size_t i = 0; i < v.size(); ++i) sum += w[i] * v[i] * v[i];
    return sum;
  }

  // When Q is too ill-conditioned for the solve to be trusted, the computed
  // update can raise the majorizer. Fall back to its exact minimizer along
  // the computed direction, or along the gradient if that direction does
  // not descend. Either keeps the cost from increasing.
  std::vector<double> safeguard(std::span<const double> xk, std::vector<double> x, const std::vector<double>& w) const {
    const double before = quadratic(xk, w);
    const double after = quadratic(x, w);
    if (std::isfinite(after) && after <= before) return x;

    const auto g = gradient(xk, w);
    auto direction = detail::subtract(x, xk);
    auto slope = [&](const std::vector<double>& d) {
      double s = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * g[i];
      return s;
    };
    double gd = slope(direction);
    if (!std::isfinite(after) || !(gd > 0.0)) {
      direction = g;
      gd = slope(direction);
    }
    if (!(gd > 0.0)) return {xk.begin(), xk.end()};

    double curvature = 0.0;
    for (double e : hp_.apply(direction)) curvature += e * e;
    const auto rd = multiply(r_, std::span<const double>(direction));
    for (std::size_t i = 0; i < rd.size(); ++i) curvature += w[i] * rd[i] * rd[i];
    const double t = gd / curvature;
    std::vector<double> out(xk.begin(), xk.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += t * direction[i];
    return out;
  }

  static std::vector<double> to_double(const std::vector<Extended>& v) { return {v.begin(), v.end()}; }

  static HighpassMatrices make_highpass(std::size_t n, const SolverConfig& cfg) {
    if (n < cfg.min_length())
      throw DimensionError("signal of length " + std::to_string(n) + " is too short; need at least " +
                           std::to_string(cfg.min_length()) + " samples");
    return cfg.filter.at_length(n);
  }

  void check(std::span<const double> x) const {
    if (x.size() != y_.size())
      throw DimensionError("estimate has length " + std::to_string(x.size()) + ", observation has " +
                           std::to_string(y_.size()));
  }

  std::vector<double> y_;
  SolverConfig cfg_;
  HighpassMatrices hp_;
  BandedMatrix r_;
  BandedMatrix r_t_;
  BasicBandedMatrix<Extended> a_ext_;
  BasicBandedMatrix<Extended> ra_ext_;
  BasicBandedMatrix<Extended> ra_t_ext_;
  BasicBandedMatrix<Extended> btb_ext_;
  std::vector<double> b_;
};

inline double cost(std::span<const double> y, std::span<const double> x, const SolverConfig& cfg) {
  return MmProblem(y, cfg).cost(x);
}

/// One MM update from x_k with the precomputed right-hand side b.
inline std::vector<double> mm_step(std::span<const double> y, std::span<const double> xk,
                                   const SolverConfig& cfg, std::span<const double> b) {
  return MmProblem(y, cfg).step(xk, b);
}

inline Decomposition solve(std::span<const double> y, const SolverConfig& cfg) {
  return MmProblem(y, cfg).solve();
}

} // namespace etea

#endif // ETEA_SOLVER_HPP
