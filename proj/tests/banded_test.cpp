#include <chrono>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "etea/banded.hpp"
#include "etea/operator.hpp"
#include "oracle.hpp"

using etea::BandedLDLT;
using etea::BandedMatrix;

namespace {

BandedMatrix random_banded(std::size_t rows, std::size_t cols, std::size_t lo, std::size_t up, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  BandedMatrix m(rows, cols, lo, up);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j)
      if (m.in_band(i, j)) m.set(i, j, u(rng));
  return m;
}

// B^T B + shift I for a random banded B with bandwidth `half`.
BandedMatrix shifted_spd(std::size_t n, std::size_t half, double shift, std::mt19937_64& rng) {
  const auto b = random_banded(n, n, half, half, rng);
  auto q = etea::multiply(etea::transpose(b), b);
  auto diag = q.band(0);
  for (double& e : diag) e += shift;
  return q;
}

} // namespace

TEST(Banded, ConstructorClipsBandwidths) {
  BandedMatrix m(3, 4, 7, 9);
  EXPECT_EQ(m.lower_bw(), 2u);
  EXPECT_EQ(m.upper_bw(), 3u);
  EXPECT_THROW(BandedMatrix(0, 3, 0, 0), etea::DimensionError);
}

TEST(Banded, EntriesOutsideBandAreZeroAndNotSettable) {
  BandedMatrix m(5, 5, 1, 0);
  m.set(3, 2, 4.0);
  EXPECT_EQ(m(3, 2), 4.0);
  EXPECT_EQ(m(0, 4), 0.0);
  EXPECT_THROW(m.set(0, 1, 1.0), etea::DimensionError);
}

TEST(Banded, SymmetricToeplitzLayout) {
  const std::vector<double> taps{4.0, -1.0, 0.5};
  const auto m = BandedMatrix::symmetric_toeplitz(6, taps);
  EXPECT_EQ(m.lower_bw(), 2u);
  EXPECT_EQ(m.upper_bw(), 2u);
  EXPECT_TRUE(oracle::dense(m).isApprox(oracle::toeplitz(6, taps)));
}

TEST(Banded, IdentityTimesMatrixIsMatrix) {
  std::mt19937_64 rng(1);
  const auto m = random_banded(5, 5, 2, 1, rng);
  const auto p = etea::multiply(BandedMatrix::identity(5), m);
  EXPECT_EQ(oracle::dense(p), oracle::dense(m));
}

TEST(Banded, DifferenceTimesTransposeIsLaplacian) {
  const auto d = etea::SparsifyingOperator(1, 1.0).as_banded(4);
  const auto l = etea::multiply(d, etea::transpose(d));
  ASSERT_EQ(l.rows(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(l(i, i), 2.0);
    if (i + 1 < 3) {
      EXPECT_EQ(l(i, i + 1), -1.0);
      EXPECT_EQ(l(i + 1, i), -1.0);
    }
  }
  EXPECT_EQ(l(0, 2), 0.0);
}

TEST(Banded, ProductBandwidthsAdd) {
  std::mt19937_64 rng(2);
  const auto a = random_banded(20, 20, 1, 2, rng);
  const auto b = random_banded(20, 20, 3, 1, rng);
  const auto c = etea::multiply(a, b);
  EXPECT_EQ(c.lower_bw(), 4u);
  EXPECT_EQ(c.upper_bw(), 3u);
}

TEST(Banded, ProductShapeMismatchThrows) {
  EXPECT_THROW(etea::multiply(BandedMatrix(3, 4, 0, 0), BandedMatrix(3, 3, 0, 0)), etea::DimensionError);
  const std::vector<double> v(5, 1.0);
  EXPECT_THROW(etea::multiply(BandedMatrix(3, 4, 0, 0), v), etea::DimensionError);
}

TEST(Banded, IdentityTimesVector) {
  const std::vector<double> v{1.5, -2.0, 3.25, 0.0};
  EXPECT_EQ(etea::multiply(BandedMatrix::identity(4), v), v);
}

TEST(Banded, DifferenceOfConstantIsZero) {
  const auto d = etea::SparsifyingOperator(1, 1.0).as_banded(10);
  const std::vector<double> c(10, 3.7);
  for (double e : etea::multiply(d, c)) EXPECT_EQ(e, 0.0);
}

TEST(Banded, RandomMatVecMatchesDense) {
  std::mt19937_64 rng(3);
  const auto m = random_banded(128, 128, 3, 2, rng);
  const auto v = oracle::random_vector(128, rng);
  const auto got = etea::multiply(m, v);
  const oracle::Vec want = oracle::dense(m) * oracle::to_eigen(v);
  EXPECT_LE((oracle::to_eigen(got) - want).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Banded, TransposeExamples) {
  const auto a = BandedMatrix::symmetric_toeplitz(7, std::vector<double>{4.0, 1.0, 0.25});
  EXPECT_EQ(oracle::dense(etea::transpose(a)), oracle::dense(a));

  const auto r = etea::SparsifyingOperator(1, 0.9).as_banded(6);
  const auto rt = etea::transpose(r);
  EXPECT_EQ(rt.lower_bw(), 1u);
  EXPECT_EQ(rt.upper_bw(), 0u);
  EXPECT_EQ(oracle::dense(rt), oracle::dense(r).transpose());

  std::mt19937_64 rng(4);
  const auto m = random_banded(9, 12, 2, 3, rng);
  EXPECT_EQ(oracle::dense(etea::transpose(etea::transpose(m))), oracle::dense(m));
}

TEST(Banded, PropertyProductsMatchDense) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> bw(0, 4), size(1, 64);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = size(rng), k = size(rng), m = size(rng);
    const auto a = random_banded(n, k, bw(rng), bw(rng), rng);
    const auto b = random_banded(k, m, bw(rng), bw(rng), rng);
    const auto c = etea::multiply(a, b);
    const oracle::Mat want = oracle::dense(a) * oracle::dense(b);
    ASSERT_LE((oracle::dense(c) - want).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
    const auto v = oracle::random_vector(k, rng);
    const oracle::Vec mv = oracle::dense(a) * oracle::to_eigen(v);
    ASSERT_LE((oracle::to_eigen(etea::multiply(a, v)) - mv).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
  }
}

TEST(Banded, AddAndScaleRows) {
  std::mt19937_64 rng(6);
  const auto a = random_banded(10, 10, 1, 2, rng);
  const auto b = random_banded(10, 10, 3, 0, rng);
  EXPECT_TRUE(oracle::dense(etea::add(a, b)).isApprox(oracle::dense(a) + oracle::dense(b)));
  const auto w = oracle::random_vector(10, rng);
  EXPECT_TRUE(oracle::dense(etea::scale_rows(w, a)).isApprox(oracle::to_eigen(w).asDiagonal() * oracle::dense(a)));
}

TEST(BandedSolve, DiagonalSystems) {
  const std::vector<double> b{1.0, -4.0, 2.5, 8.0};
  std::vector<double> two(4, 2.0);
  const auto x = etea::solve_spd(BandedMatrix::diagonal(two), b);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_DOUBLE_EQ(x[i], b[i] / 2.0);
  EXPECT_EQ(etea::solve_spd(BandedMatrix::identity(4), b), b);
}

TEST(BandedSolve, HeptadiagonalMatchesDense) {
  std::mt19937_64 rng(7);
  const auto q = shifted_spd(256, 3, 0.1, rng);
  ASSERT_EQ(q.lower_bw(), 6u);
  const auto b = oracle::random_vector(256, rng);
  const auto x = etea::solve_spd(q, b);
  const oracle::Vec want = oracle::dense(q).ldlt().solve(oracle::to_eigen(b));
  EXPECT_LE(oracle::rel_diff(x, want), 1e-8);
}

TEST(BandedSolve, ResidualBoundOnRandomInstances) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> half(0, 3), size(1, 300);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = shifted_spd(size(rng), half(rng), 1e-3, rng);
    const auto b = oracle::random_vector(q.rows(), rng, 10.0);
    const auto x = etea::solve_spd(q, b);
    const auto qx = etea::multiply(q, x);
    double res = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      res = std::max(res, std::abs(qx[i] - b[i]));
      bmax = std::max(bmax, std::abs(b[i]));
    }
    ASSERT_LE(res, 1e-10 * std::max(1.0, bmax)) << "trial " << trial;
  }
}

TEST(BandedSolve, IndefiniteMatrixReportsPivot) {
  auto q = BandedMatrix::symmetric_toeplitz(5, std::vector<double>{2.0, -1.0});
  q.set(3, 3, -1.0);
  try {
    BandedLDLT f(q);
    FAIL() << "expected NotPositiveDefinite";
  } catch (const etea::NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 3u);
  }
  EXPECT_THROW(BandedLDLT(BandedMatrix(3, 4, 1, 1)), etea::DimensionError);
}

TEST(BandedSolve, ExtendedPrecisionFactorAgrees) {
  std::mt19937_64 rng(9);
  const auto q = shifted_spd(100, 2, 0.5, rng);
  const auto b = oracle::random_vector(100, rng);
  const auto xd = BandedLDLT(q).solve(b);
  const auto xl = etea::BasicBandedLDLT<long double>(q.cast<long double>()).solve(std::span<const double>(b));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(xd[i], static_cast<double>(xl[i]), 1e-10);
}

TEST(BandedSolve, RuntimeIsLinearInRows) {
  std::mt19937_64 rng(10);
  auto best_time = [&](std::size_t n) {
    const auto q = shifted_spd(n, 2, 1.0, rng);
    const auto b = oracle::random_vector(n, rng);
    double best = 1e300;
    for (int rep = 0; rep < 7; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      const auto x = etea::solve_spd(q, b);
      const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      best = std::min(best, ms);
      EXPECT_EQ(x.size(), n);
    }
    return best;
  };
  const double small = best_time(5000);
  const double large = best_time(100000);
  const double ratio = large / small;
  EXPECT_GE(ratio, 20.0 / 3.0);
  EXPECT_LE(ratio, 60.0);
}
