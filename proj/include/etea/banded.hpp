#ifndef ETEA_BANDED_HPP
#define ETEA_BANDED_HPP

// Banded matrices: storage, products, and a root-free LDL^T direct solver
// for symmetric positive-definite systems.
//
// Storage is diagonal-major. Band `o` (o in [-lower_bw, upper_bw]) is a
// contiguous array of length rows() whose element i holds M(i, i + o).
// Slots whose column falls outside [0, cols) are kept at zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "etea/error.hpp"

namespace etea {

template <typename T>
class BasicBandedMatrix {
public:
  using value_type = T;

  BasicBandedMatrix() = default;

  /// Zero matrix. Bandwidths are clipped so that lower_bw < rows and
  /// upper_bw < cols.
  BasicBandedMatrix(std::size_t rows, std::size_t cols, std::size_t lower_bw, std::size_t upper_bw)
      : rows_(rows), cols_(cols) {
    if (rows == 0 || cols == 0) throw DimensionError("BandedMatrix: empty dimensions");
    lower_ = std::min(lower_bw, rows - 1);
    upper_ = std::min(upper_bw, cols - 1);
    data_.assign((lower_ + upper_ + 1) * rows_, T{0});
  }

  static BasicBandedMatrix identity(std::size_t n) {
    BasicBandedMatrix m(n, n, 0, 0);
    std::fill(m.data_.begin(), m.data_.end(), T{1});
    return m;
  }

  static BasicBandedMatrix diagonal(std::span<const T> d) {
    BasicBandedMatrix m(d.size(), d.size(), 0, 0);
    std::copy(d.begin(), d.end(), m.data_.begin());
    return m;
  }

  /// n x n symmetric Toeplitz matrix with M(i, j) = taps[|i - j|] for
  /// |i - j| < taps.size(); taps[0] is the main diagonal.
  static BasicBandedMatrix symmetric_toeplitz(std::size_t n, std::span<const T> taps) {
    if (taps.empty()) throw DimensionError("symmetric_toeplitz: no taps");
    const std::size_t bw = taps.size() - 1;
    BasicBandedMatrix m(n, n, bw, bw);
    for (std::ptrdiff_t o = -m.lower(); o <= m.upper(); ++o) {
      const T c = taps[static_cast<std::size_t>(std::abs(o))];
      auto band = m.band(o);
      for (std::size_t i = m.first_row(o); i < m.end_row(o); ++i) band[i] = c;
    }
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t lower_bw() const noexcept { return lower_; }
  std::size_t upper_bw() const noexcept { return upper_; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return i < rows_ && j < cols_ && j + lower_ >= i && i + upper_ >= j;
  }

  /// Entry (i, j); zero outside the band.
  T operator()(std::size_t i, std::size_t j) const noexcept {
    if (!in_band(i, j)) return T{0};
    return data_[slot(i, j)];
  }

  void set(std::size_t i, std::size_t j, T value) {
    if (!in_band(i, j))
      throw DimensionError("BandedMatrix::set: (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") is outside the band");
    data_[slot(i, j)] = value;
  }

  /// Band at offset o (column - row), indexed by row.
  std::span<T> band(std::ptrdiff_t o) {
    return {data_.data() + band_index(o) * rows_, rows_};
  }
  std::span<const T> band(std::ptrdiff_t o) const {
    return {data_.data() + band_index(o) * rows_, rows_};
  }

  /// Rows i for which column i + o exists: [first_row(o), end_row(o)).
  std::size_t first_row(std::ptrdiff_t o) const noexcept {
    return o < 0 ? static_cast<std::size_t>(-o) : 0;
  }
  std::size_t end_row(std::ptrdiff_t o) const noexcept {
    const std::ptrdiff_t limit = static_cast<std::ptrdiff_t>(cols_) - o;
    if (limit <= 0) return first_row(o);
    return std::max(first_row(o), std::min(rows_, static_cast<std::size_t>(limit)));
  }

  std::ptrdiff_t lower() const noexcept { return static_cast<std::ptrdiff_t>(lower_); }
  std::ptrdiff_t upper() const noexcept { return static_cast<std::ptrdiff_t>(upper_); }

  /// Entrywise conversion to another scalar type.
  template <typename U>
  BasicBandedMatrix<U> cast() const {
    BasicBandedMatrix<U> out(rows_, cols_, lower_, upper_);
    for (std::ptrdiff_t o = -lower(); o <= upper(); ++o) {
      const auto src = band(o);
      auto dst = out.band(o);
      for (std::size_t i = 0; i < rows_; ++i) dst[i] = static_cast<U>(src[i]);
    }
    return out;
  }

private:
  std::size_t band_index(std::ptrdiff_t o) const {
    if (o < -lower() || o > upper()) throw DimensionError("BandedMatrix: band offset outside bandwidth");
    return static_cast<std::size_t>(o + lower());
  }
  std::size_t slot(std::size_t i, std::size_t j) const noexcept {
    const std::ptrdiff_t o = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(i);
    return static_cast<std::size_t>(o + lower()) * rows_ + i;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t lower_ = 0;
  std::size_t upper_ = 0;
  std::vector<T> data_;
};

using BandedMatrix = BasicBandedMatrix<double>;

/// Product of two banded matrices. Bandwidths add (clipped to the result's
/// dimensions).
template <typename T>
BasicBandedMatrix<T> multiply(const BasicBandedMatrix<T>& lhs, const BasicBandedMatrix<T>& rhs) {
  if (lhs.cols() != rhs.rows())
    throw DimensionError("multiply: incompatible shapes " + std::to_string(lhs.rows()) + "x" +
                         std::to_string(lhs.cols()) + " and " + std::to_string(rhs.rows()) + "x" +
                         std::to_string(rhs.cols()));
  BasicBandedMatrix<T> out(lhs.rows(), rhs.cols(), lhs.lower_bw() + rhs.lower_bw(),
                   lhs.upper_bw() + rhs.upper_bw());
  const auto rows = static_cast<std::ptrdiff_t>(lhs.rows());
  const auto inner = static_cast<std::ptrdiff_t>(lhs.cols());
  const auto cols = static_cast<std::ptrdiff_t>(rhs.cols());
  for (std::ptrdiff_t ol = -lhs.lower(); ol <= lhs.upper(); ++ol) {
    const auto a = lhs.band(ol);
    for (std::ptrdiff_t orr = -rhs.lower(); orr <= rhs.upper(); ++orr) {
      const std::ptrdiff_t oc = ol + orr;
      if (oc < -out.lower() || oc > out.upper()) continue;
      const auto b = rhs.band(orr);
      auto c = out.band(oc);
      // 0 <= i < rows, 0 <= i + ol < inner, 0 <= i + oc < cols
      const std::ptrdiff_t lo = std::max({std::ptrdiff_t{0}, -ol, -oc});
      const std::ptrdiff_t hi = std::min({rows, inner - ol, cols - oc});
      for (std::ptrdiff_t i = lo; i < hi; ++i) c[i] += a[i] * b[i + ol];
    }
  }
  return out;
}

template <typename T>
std::vector<T> multiply(const BasicBandedMatrix<T>& m, std::span<const T> v) {
  if (m.cols() != v.size())
    throw DimensionError("multiply: matrix has " + std::to_string(m.cols()) +
                         " columns but vector has length " + std::to_string(v.size()));
  std::vector<T> out(m.rows(), T{0});
  for (std::ptrdiff_t o = -m.lower(); o <= m.upper(); ++o) {
    const auto band = m.band(o);
    const std::size_t end = m.end_row(o);
    for (std::size_t i = m.first_row(o); i < end; ++i) out[i] += band[i] * v[i + o];
  }
  return out;
}
template <typename T>
std::vector<T> multiply(const BasicBandedMatrix<T>& m, const std::vector<T>& v) {
  return multiply(m, std::span<const T>(v));
}

template <typename T>
BasicBandedMatrix<T> transpose(const BasicBandedMatrix<T>& m) {
  BasicBandedMatrix<T> t(m.cols(), m.rows(), m.upper_bw(), m.lower_bw());
  for (std::ptrdiff_t o = -m.lower(); o <= m.upper(); ++o) {
    const auto src = m.band(o);
    auto dst = t.band(-o);
    for (std::size_t i = m.first_row(o); i < m.end_row(o); ++i) dst[i + o] = src[i];
  }
  return t;
}

/// Entrywise sum of two equally shaped banded matrices.
template <typename T>
BasicBandedMatrix<T> add(const BasicBandedMatrix<T>& lhs, const BasicBandedMatrix<T>& rhs) {
  if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols())
    throw DimensionError("add: shape mismatch");
  BasicBandedMatrix<T> out(lhs.rows(), lhs.cols(), std::max(lhs.lower_bw(), rhs.lower_bw()),
                   std::max(lhs.upper_bw(), rhs.upper_bw()));
  for (const BasicBandedMatrix<T>* term : {&lhs, &rhs}) {
    for (std::ptrdiff_t o = -term->lower(); o <= term->upper(); ++o) {
      const auto src = term->band(o);
      auto dst = out.band(o);
      for (std::size_t i = term->first_row(o); i < term->end_row(o); ++i) dst[i] += src[i];
    }
  }
  return out;
}

/// diag(weights) * m.
template <typename T>
BasicBandedMatrix<T> scale_rows(std::span<const T> weights, BasicBandedMatrix<T> m) {
  if (weights.size() != m.rows()) throw DimensionError("scale_rows: weight count != rows");
  for (std::ptrdiff_t o = -m.lower(); o <= m.upper(); ++o) {
    auto band = m.band(o);
    for (std::size_t i = 0; i < band.size(); ++i) band[i] *= weights[i];
  }
  return m;
}
template <typename T>
BasicBandedMatrix<T> scale_rows(const std::vector<T>& weights, BasicBandedMatrix<T> m) {
  return scale_rows(std::span<const T>(weights), std::move(m));
}

/// Root-free LDL^T factorization of a symmetric positive-definite banded
/// matrix. Only the lower band of the input is read. Factor cost is
/// O(n * bw^2); each solve is O(n * bw).
template <typename T>
class BasicBandedLDLT {
public:
  explicit BasicBandedLDLT(const BasicBandedMatrix<T>& q) : n_(q.rows()), bw_(q.lower_bw()) {
    if (q.rows() != q.cols()) throw DimensionError("BandedLDLT: matrix is not square");
    d_.assign(n_, T{0});
    l_.assign(bw_ * n_, T{0});
    std::vector<T> ld(bw_ + 1, T{0});  // L(j, k) * d_k for the current row j
    for (std::size_t j = 0; j < n_; ++j) {
      const std::size_t k0 = j > bw_ ? j - bw_ : 0;
      T pivot = q(j, j);
      for (std::size_t k = k0; k < j; ++k) {
        ld[j - k] = lower(j, k) * d_[k];
        pivot -= lower(j, k) * ld[j - k];
      }
      if (!(pivot > T{0}) || !std::isfinite(pivot)) throw NotPositiveDefinite(j);
      d_[j] = pivot;
      const std::size_t i_end = std::min(n_, j + bw_ + 1);
      for (std::size_t i = j + 1; i < i_end; ++i) {
        T t = q(i, j);
        for (std::size_t k = std::max(k0, i > bw_ ? i - bw_ : 0); k < j; ++k)
          t -= lower(i, k) * ld[j - k];
        lower(i, j) = t / pivot;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  std::span<const T> pivots() const noexcept { return d_; }

  /// Solves in the factor's precision; the right-hand side may be of any
  /// floating type.
  template <typename U>
  std::vector<T> solve(std::span<const U> b) const {
    if (b.size() != n_) throw DimensionError("BandedLDLT::solve: right-hand side length mismatch");
    std::vector<T> x(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {
      T s = x[i];
      for (std::size_t k = i > bw_ ? i - bw_ : 0; k < i; ++k) s -= lower(i, k) * x[k];
      x[i] = s;
    }
    for (std::size_t i = 0; i < n_; ++i) x[i] /= d_[i];
    for (std::size_t i = n_; i-- > 0;) {
      T s = x[i];
      const std::size_t k_end = std::min(n_, i + bw_ + 1);
      for (std::size_t k = i + 1; k < k_end; ++k) s -= lower(k, i) * x[k];
      x[i] = s;
    }
    return x;
  }
  std::vector<T> solve(const std::vector<double>& b) const { return solve(std::span<const double>(b)); }

private:
  // L(i, k) for 0 < i - k <= bw, stored by offset.
  T& lower(std::size_t i, std::size_t k) { return l_[(i - k - 1) * n_ + k]; }
  T lower(std::size_t i, std::size_t k) const { return l_[(i - k - 1) * n_ + k]; }

  std::size_t n_;
  std::size_t bw_;
  std::vector<T> d_;
  std::vector<T> l_;
};

using BandedLDLT = BasicBandedLDLT<double>;

/// Solves q x = b for symmetric positive-definite banded q.
template <typename T>
std::vector<T> solve_spd(const BasicBandedMatrix<T>& q, std::span<const T> b) {
  return BasicBandedLDLT<T>(q).solve(b);
}
inline std::vector<double> solve_spd(const BandedMatrix& q, const std::vector<double>& b) {
  return solve_spd(q, std::span<const double>(b));
}

} // namespace etea

#endif // ETEA_BANDED_HPP
