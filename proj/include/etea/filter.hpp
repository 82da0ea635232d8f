#ifndef ETEA_FILTER_HPP
#define ETEA_FILTER_HPP

// Zero-phase highpass filters H = B A^-1 with symmetric banded A and B.
//
// For order d and cutoff fc (cycles/sample):
//   B(z) = (-z + 2 - z^-1)^d
//   A(z) = B(z) + alpha (z + 2 + z^-1)^d,   alpha = tan^(2d)(pi fc)
// On the unit circle H(w) = s^d / (s^d + alpha c^d) with s = sin^2(w/2) and
// c = cos^2(w/2), so H(0) = 0, H(pi) = 1 and H(2 pi fc) = 1/2.
// Finite-length A and B are plain Toeplitz truncations; a few samples at each
// edge are therefore not exactly filtered.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "etea/banded.hpp"
#include "etea/error.hpp"
#include "etea/operator.hpp"

namespace etea {

namespace detail {

// Coefficients c_0 .. c_d of the symmetric Laurent polynomial
// (outer z + center + outer z^-1)^d, c_0 being the z^0 coefficient.
inline std::vector<double> symmetric_power(double outer, double center, int d) {
  std::vector<double> full{1.0};
  for (int i = 0; i < d; ++i) {
    std::vector<double> next(full.size() + 2, 0.0);
    for (std::size_t k = 0; k < full.size(); ++k) {
      next[k] += outer * full[k];
      next[k + 1] += center * full[k];
      next[k + 2] += outer * full[k];
    }
    full = std::move(next);
  }
  return {full.begin() + d, full.end()};
}

} // namespace detail

/// A and B materialized for one signal length, with A factorized once.
class HighpassMatrices {
public:
  HighpassMatrices(BandedMatrix a, BandedMatrix b) : a_(std::move(a)), b_(std::move(b)), a_factor_(a_) {}

  const BandedMatrix& a() const noexcept { return a_; }
  const BandedMatrix& b() const noexcept { return b_; }
  std::size_t size() const noexcept { return a_.rows(); }

  /// A^-1 v.
  std::vector<double> solve_a(std::span<const double> v) const { return a_factor_.solve(v); }

  /// H v = B A^-1 v.
  std::vector<double> apply(std::span<const double> v) const { return multiply(b_, a_factor_.solve(v)); }

  /// H^T v = A^-1 B v (A and B are symmetric).
  std::vector<double> apply_transpose(std::span<const double> v) const {
    return a_factor_.solve(multiply(b_, v));
  }

private:
  BandedMatrix a_;
  BandedMatrix b_;
  BandedLDLT a_factor_;
};

class ZeroPhaseFilter {
public:
  static ZeroPhaseFilter design(int d, double fc) {
    if (d < 1) throw ParameterError("filter order d must be >= 1");
    if (!(fc > 0.0 && fc < 0.5)) throw ParameterError("filter cutoff fc must lie in (0, 0.5) cycles/sample");
    ZeroPhaseFilter f;
    f.d_ = d;
    f.fc_ = fc;
    const double alpha = std::pow(std::tan(std::numbers::pi * fc), 2 * d);
    f.alpha_ = alpha;
    f.b_taps_ = detail::symmetric_power(-1.0, 2.0, d);
    f.a_taps_ = detail::symmetric_power(1.0, 2.0, d);
    for (std::size_t k = 0; k < f.a_taps_.size(); ++k) f.a_taps_[k] = f.b_taps_[k] + alpha * f.a_taps_[k];
    return f;
  }

  int order() const noexcept { return d_; }
  double cutoff() const noexcept { return fc_; }

  /// Taps a_0 .. a_d and b_0 .. b_d; index 0 is the main diagonal.
  const std::vector<double>& a_taps() const noexcept { return a_taps_; }
  const std::vector<double>& b_taps() const noexcept { return b_taps_; }

  /// Real frequency response H(e^{jw}), in the factored form
  /// s^d / (s^d + alpha c^d). Summing the taps directly loses digits for
  /// small fc and large d.
  double response(double omega) const {
    const double s = std::pow(std::sin(0.5 * omega), 2 * d_);
    const double c = std::pow(std::cos(0.5 * omega), 2 * d_);
    return s / (s + alpha_ * c);
  }

  /// Shortest signal the filter accepts.
  std::size_t min_length() const noexcept { return 2 * static_cast<std::size_t>(d_) + 2; }

  HighpassMatrices at_length(std::size_t n) const {
    if (n < min_length())
      throw DimensionError("highpass filter of order " + std::to_string(d_) + " needs more than " +
                           std::to_string(2 * d_ + 1) + " samples, got " + std::to_string(n));
    return {BandedMatrix::symmetric_toeplitz(n, a_taps_), BandedMatrix::symmetric_toeplitz(n, b_taps_)};
  }

  std::vector<double> apply(std::span<const double> v) const { return at_length(v.size()).apply(v); }
  std::vector<double> apply_transpose(std::span<const double> v) const {
    return at_length(v.size()).apply_transpose(v);
  }

private:
  ZeroPhaseFilter() = default;

  int d_ = 1;
  double fc_ = 0.25;
  double alpha_ = 1.0;
  std::vector<double> a_taps_;
  std::vector<double> b_taps_;
};

inline std::vector<double> apply_highpass(const ZeroPhaseFilter& filter, std::span<const double> v) {
  return filter.apply(v);
}

template <typename F>
concept LinearFilter = requires(const F& f, std::span<const double> v) {
  { f.apply(v) } -> std::convertible_to<std::vector<double>>;
};

/// Length-n impulse response of H^2(z) / R(z) (order 1) or H^2(z) / R2(z)
/// (order 2): a unit impulse at n/2 is passed through the filter twice and
/// then through the causal recursion y(k) = u(k) + r y(k-1) once per order.
/// Throws ResponseTooShort unless the final 1% of samples is below 1e-9 of
/// the peak magnitude.
template <LinearFilter Filter>
std::vector<double> impulse_response_cascade(const Filter& filter, const SparsifyingOperator& op, std::size_t n) {
  if (n < 8) throw DimensionError("impulse response length too small");
  std::vector<double> h(n, 0.0);
  h[n / 2] = 1.0;
  h = filter.apply(h);
  h = filter.apply(h);
  const double r = op.rate();
  for (int pass = 0; pass < op.order(); ++pass)
    for (std::size_t k = 1; k < n; ++k) h[k] += r * h[k - 1];

  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  const std::size_t tail = std::max<std::size_t>(1, n / 100);
  double tail_peak = 0.0;
  for (std::size_t k = n - tail; k < n; ++k) tail_peak = std::max(tail_peak, std::abs(h[k]));
  if (tail_peak > 1e-9 * peak)
    throw ResponseTooShort("impulse response has not decayed within " + std::to_string(n) +
                           " samples (tail/peak = " + std::to_string(tail_peak / peak) +
                           "); use a larger length");
  return h;
}

} // namespace etea

#endif // ETEA_FILTER_HPP
