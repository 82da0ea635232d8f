#ifndef ETEA_OPERATOR_HPP
#define ETEA_OPERATOR_HPP

// Recursive-filter sparsifying operators.
//
// Order 1 (transfer 1 - r z^-1) maps x of length n to
//   v(k) = x(k+1) - r x(k),                      k = 0 .. n-2,
// order 2 (transfer (1 - r z^-1)^2) to
//   v(k) = r^2 x(k) - 2r x(k+1) + x(k+2),         k = 0 .. n-3.
// With r = 1 these are the first and second differences.
//
// The inverse G (R G = I) is the causal recursion x(i) = r x(i-1) + v(i-1)
// with x(0) = 0, applied `order` times: G is n x (n - order) and its first
// `order` rows are zero. G is never formed; both G and G^T act in O(n).

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "etea/banded.hpp"
#include "etea/error.hpp"

namespace etea {

/// r such that r^n0 = 1/2, i.e. a step exponential halves after n0 samples.
inline double estimate_rate_from_halflife(double n0) {
  if (!(n0 > 0.0) || !std::isfinite(n0)) throw ParameterError("half-life must be a positive number of samples");
  return std::pow(0.5, 1.0 / n0);
}

class SparsifyingOperator {
public:
  SparsifyingOperator(int order, double rate) : order_(order), rate_(rate) {
    if (order != 1 && order != 2) throw ParameterError("operator order must be 1 or 2");
    if (!(rate >= 0.0 && rate <= 1.0)) throw ParameterError("operator rate r must lie in [0, 1]");
  }

  static SparsifyingOperator from_halflife(int order, double n0) {
    return {order, estimate_rate_from_halflife(n0)};
  }

  int order() const noexcept { return order_; }
  double rate() const noexcept { return rate_; }

  /// Row stencil, leftmost coefficient first.
  std::vector<double> stencil() const {
    if (order_ == 1) return {-rate_, 1.0};
    return {rate_ * rate_, -2.0 * rate_, 1.0};
  }

  std::complex<double> transfer(double omega) const {
    const auto zinv = std::polar(1.0, -omega);
    const auto first = 1.0 - rate_ * zinv;
    return order_ == 1 ? first : first * first;
  }

  /// Advisory message when the rate is outside the range where the
  /// second-order model is known to behave well.
  std::optional<std::string> range_warning() const {
    if (order_ == 2 && !(rate_ > 0.90 && rate_ < 0.98))
      return "second-order rate r = " + std::to_string(rate_) +
             " is outside the recommended range 0.90 < r < 0.98";
    return std::nullopt;
  }

  /// (n - order) x n banded matrix.
  BandedMatrix as_banded(std::size_t n) const {
    check_length(n);
    const auto taps = stencil();
    BandedMatrix m(n - order_, n, 0, static_cast<std::size_t>(order_));
    for (std::size_t t = 0; t < taps.size(); ++t) {
      auto band = m.band(static_cast<std::ptrdiff_t>(t));
      for (double& e : band) e = taps[t];
    }
    return m;
  }

  /// R x.
  std::vector<double> apply(std::span<const double> x) const {
    check_length(x.size());
    const std::size_t m = x.size() - order_;
    std::vector<double> v(m);
    if (order_ == 1) {
      for (std::size_t k = 0; k < m; ++k) v[k] = x[k + 1] - rate_ * x[k];
    } else {
      const double r2 = rate_ * rate_, r1 = 2.0 * rate_;
      for (std::size_t k = 0; k < m; ++k) v[k] = r2 * x[k] - r1 * x[k + 1] + x[k + 2];
    }
    return v;
  }

  /// G v; output length v.size() + order, leading `order` samples zero.
  std::vector<double> apply_inverse(std::span<const double> v) const {
    std::vector<double> x(v.begin(), v.end());
    for (int pass = 0; pass < order_; ++pass) {
      std::vector<double> next(x.size() + 1, 0.0);
      for (std::size_t i = 1; i < next.size(); ++i) next[i] = rate_ * next[i - 1] + x[i - 1];
      x = std::move(next);
    }
    return x;
  }

  /// G^T e; output length e.size() - order. Each pass runs the anti-causal
  /// recursion s(i) = e(i) + r s(i+1) and drops the first sample, which is
  /// the contribution of G's leading zero row.
  std::vector<double> apply_inverse_adjoint(std::span<const double> e) const {
    check_length(e.size());
    std::vector<double> s(e.begin(), e.end());
    for (int pass = 0; pass < order_; ++pass) {
      for (std::size_t i = s.size() - 1; i-- > 0;) s[i] += rate_ * s[i + 1];
      s.erase(s.begin());
    }
    return s;
  }

private:
  void check_length(std::size_t n) const {
    if (n < static_cast<std::size_t>(order_) + 1)
      throw DimensionError("operator of order " + std::to_string(order_) + " needs at least " +
                           std::to_string(order_ + 1) + " samples, got " + std::to_string(n));
  }

  int order_;
  double rate_;
};

} // namespace etea

#endif // ETEA_OPERATOR_HPP
