#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "etea/filter.hpp"
#include "oracle.hpp"

using etea::ZeroPhaseFilter;

namespace {

// H(w) from the design formulas: s^d / (s^d + alpha c^d).
double response_oracle(int d, double fc, double omega) {
  const double s = std::pow(std::sin(omega / 2.0), 2), c = std::pow(std::cos(omega / 2.0), 2);
  const double alpha = std::pow(std::tan(std::numbers::pi * fc), 2 * d);
  return std::pow(s, d) / (std::pow(s, d) + alpha * std::pow(c, d));
}

double poly_response(const std::vector<double>& taps, double omega) {
  double sum = taps[0];
  for (std::size_t k = 1; k < taps.size(); ++k) sum += 2.0 * taps[k] * std::cos(omega * static_cast<double>(k));
  return sum;
}

struct Identity {
  std::vector<double> apply(std::span<const double> v) const { return {v.begin(), v.end()}; }
};

double norm(const std::vector<double>& v) { return oracle::to_eigen(v).norm(); }

} // namespace

TEST(Filter, QuarterCutoffTaps) {
  const auto f = ZeroPhaseFilter::design(1, 0.25);
  ASSERT_EQ(f.b_taps().size(), 2u);
  EXPECT_DOUBLE_EQ(f.b_taps()[0], 2.0);
  EXPECT_DOUBLE_EQ(f.b_taps()[1], -1.0);
  EXPECT_NEAR(f.a_taps()[0], 4.0, 1e-15);
  EXPECT_NEAR(f.a_taps()[1], 0.0, 1e-15);
  EXPECT_NEAR(f.response(0.0), 0.0, 1e-15);
  EXPECT_NEAR(f.response(std::numbers::pi), 1.0, 1e-15);
  EXPECT_NEAR(f.response(std::numbers::pi / 2.0), 0.5, 1e-15);
}

TEST(Filter, TapsMatchDesignPolynomials) {
  for (int d : {1, 2, 3}) {
    const double fc = 0.013;
    const auto f = ZeroPhaseFilter::design(d, fc);
    const auto bt = oracle::power_taps(-1.0, 2.0, d), ct = oracle::power_taps(1.0, 2.0, d);
    const double alpha = std::pow(std::tan(std::numbers::pi * fc), 2 * d);
    ASSERT_EQ(f.b_taps().size(), static_cast<std::size_t>(d + 1));
    double bsum = f.b_taps()[0];
    for (std::size_t k = 0; k < bt.size(); ++k) {
      EXPECT_DOUBLE_EQ(f.b_taps()[k], bt[k]);
      EXPECT_NEAR(f.a_taps()[k], bt[k] + alpha * ct[k], 1e-14);
      if (k) bsum += 2.0 * f.b_taps()[k];
    }
    EXPECT_EQ(bsum, 0.0);
  }
}

TEST(Filter, CutoffRegressionAtOrderTwo) {
  const auto f = ZeroPhaseFilter::design(2, 0.013);
  const double w = 2.0 * std::numbers::pi * 0.013;
  EXPECT_NEAR(poly_response(f.b_taps(), w) / poly_response(f.a_taps(), w), 0.5, 1e-10);
  EXPECT_NEAR(f.response(w), 0.5, 1e-10);
}

TEST(Filter, ResponseOnDesignGrid) {
  for (int d : {1, 2, 3, 4})
    for (double fc : {0.005, 0.013, 0.05, 0.1, 0.25, 0.4}) {
      const auto f = ZeroPhaseFilter::design(d, fc);
      EXPECT_NEAR(f.response(0.0), 0.0, 1e-14);
      EXPECT_NEAR(f.response(std::numbers::pi), 1.0, 1e-12);
      EXPECT_NEAR(f.response(2.0 * std::numbers::pi * fc), 0.5, 1e-12) << "d=" << d << " fc=" << fc;
      for (double w = 0.05; w < std::numbers::pi; w += 0.1)
        EXPECT_NEAR(f.response(w), response_oracle(d, fc, w), 1e-12);
    }
}

TEST(Filter, TapPolynomialsAgreeWithResponse) {
  for (int d : {1, 2})
    for (double fc : {0.013, 0.05, 0.25})
      for (double w = 0.0; w <= std::numbers::pi; w += 0.01) {
        const auto f = ZeroPhaseFilter::design(d, fc);
        EXPECT_NEAR(poly_response(f.b_taps(), w) / poly_response(f.a_taps(), w), f.response(w), 1e-9);
      }
}

TEST(Filter, DesignRejectsBadParameters) {
  EXPECT_THROW(ZeroPhaseFilter::design(0, 0.1), etea::ParameterError);
  EXPECT_THROW(ZeroPhaseFilter::design(1, 0.0), etea::ParameterError);
  EXPECT_THROW(ZeroPhaseFilter::design(1, 0.5), etea::ParameterError);
  EXPECT_THROW(ZeroPhaseFilter::design(1, -0.2), etea::ParameterError);
  EXPECT_THROW(ZeroPhaseFilter::design(2, 0.1).apply(std::vector<double>(5, 1.0)), etea::DimensionError);
}

TEST(Filter, RejectsConstantAwayFromEdges) {
  const std::vector<double> c(64, 2.5);
  const auto out = etea::apply_highpass(ZeroPhaseFilter::design(1, 0.25), c);
  for (std::size_t k = 2; k + 2 < out.size(); ++k) EXPECT_LE(std::abs(out[k]), 1e-10 * 2.5) << k;

  // Edge errors decay with the poles of 1/A(z), about 0.41 per sample here.
  const auto out2 = etea::apply_highpass(ZeroPhaseFilter::design(2, 0.25), std::vector<double>(200, 2.5));
  for (std::size_t k = 40; k + 40 < out2.size(); ++k) EXPECT_LE(std::abs(out2[k]), 1e-10 * 2.5) << k;
}

TEST(Filter, ZeroInZeroOut) {
  const auto out = ZeroPhaseFilter::design(2, 0.013).apply(std::vector<double>(100, 0.0));
  for (double e : out) EXPECT_EQ(e, 0.0);
}

TEST(Filter, MatchesDenseOracle) {
  std::mt19937_64 rng(31);
  for (auto [d, fc] : {std::pair{1, 0.25}, std::pair{1, 0.013}, std::pair{2, 0.05}}) {
    const std::size_t n = 200;
    const auto v = oracle::random_vector(n, rng);
    const oracle::Vec want = oracle::highpass(oracle::filter(d, fc, n)) * oracle::to_eigen(v);
    const auto f = ZeroPhaseFilter::design(d, fc);
    EXPECT_LE((oracle::to_eigen(f.apply(v)) - want).cwiseAbs().maxCoeff(), 1e-10);
    const oracle::Vec want_t = oracle::highpass(oracle::filter(d, fc, n)).transpose() * oracle::to_eigen(v);
    EXPECT_LE((oracle::to_eigen(f.apply_transpose(v)) - want_t).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Filter, ImpulseResponseIsSymmetric) {
  for (int d : {1, 2}) {
    const auto f = ZeroPhaseFilter::design(d, 0.05);
    const std::size_t n = 401, c = 200;
    std::vector<double> delta(n, 0.0);
    delta[c] = 1.0;
    const auto h = f.apply(delta);
    for (std::size_t k = 1; k < 150; ++k) EXPECT_NEAR(h[c - k], h[c + k], 1e-10);
  }
}

TEST(Filter, Linearity) {
  std::mt19937_64 rng(32);
  const auto f = ZeroPhaseFilter::design(2, 0.02);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = oracle::random_vector(300, rng), v = oracle::random_vector(300, rng);
    const double a = 1.7, b = -0.3;
    std::vector<double> mix(300);
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = a * u[i] + b * v[i];
    const auto fu = f.apply(u), fv = f.apply(v), fm = f.apply(mix);
    for (std::size_t i = 0; i < mix.size(); ++i) EXPECT_NEAR(fm[i], a * fu[i] + b * fv[i], 1e-10);
  }
}

TEST(Cascade, ZeroRateIsFilterSquared) {
  const auto f = ZeroPhaseFilter::design(1, 0.1);
  const std::size_t n = 512;
  const auto h = etea::impulse_response_cascade(f, etea::SparsifyingOperator(1, 0.0), n);
  std::vector<double> delta(n, 0.0);
  delta[n / 2] = 1.0;
  const auto h2 = f.apply(f.apply(delta));
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(h[k], h2[k], 1e-15);
}

TEST(Cascade, IdentityFilterGivesGeometricSequence) {
  const std::size_t n = 1000;
  const auto h = etea::impulse_response_cascade(Identity{}, etea::SparsifyingOperator(1, 0.5), n);
  for (std::size_t k = 0; k < n / 2; ++k) EXPECT_EQ(h[k], 0.0);
  for (std::size_t k = n / 2; k < n; ++k) EXPECT_NEAR(h[k], std::pow(0.5, static_cast<double>(k - n / 2)), 1e-300);
  const auto h2 = etea::impulse_response_cascade(Identity{}, etea::SparsifyingOperator(2, 0.5), n);
  for (std::size_t k = n / 2; k < n / 2 + 40; ++k)
    EXPECT_NEAR(h2[k], static_cast<double>(k - n / 2 + 1) * std::pow(0.5, static_cast<double>(k - n / 2)), 1e-15);
}

TEST(Cascade, NormMatchesDenseOperatorColumn) {
  const std::size_t n = 1024;
  for (int order : {1, 2}) {
    const double r = order == 1 ? 0.94 : 0.95;
    const auto h = etea::impulse_response_cascade(ZeroPhaseFilter::design(1, 0.013), etea::SparsifyingOperator(order, r), n);
    const auto fl = oracle::filter(1, 0.013, n);
    const oracle::Mat H = oracle::highpass(fl);
    const oracle::Mat G = oracle::inverse_sparsifier(order, r, n);
    const oracle::Vec col = G.transpose() * (H.transpose() * H.col(static_cast<Eigen::Index>(n / 2)));
    EXPECT_NEAR(norm(h), col.norm(), 1e-6 * col.norm()) << "order " << order;
  }
}

TEST(Cascade, NormMatchesFrequencyIntegral) {
  // ||h||^2 = (1/2pi) \int |H|^4 / |R|^2 dw, by a periodic trapezoid rule.
  const std::size_t n = 4096;
  const double r = 0.94;
  const auto h = etea::impulse_response_cascade(ZeroPhaseFilter::design(1, 0.013), etea::SparsifyingOperator(1, r), n);
  const int points = 1 << 18;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double w = 2.0 * std::numbers::pi * i / points;
    const double hw = response_oracle(1, 0.013, w);
    sum += std::pow(hw, 4) / (1.0 - 2.0 * r * std::cos(w) + r * r);
  }
  const double want = std::sqrt(sum / points);
  EXPECT_NEAR(norm(h), want, 1e-6 * want);
}

TEST(Cascade, ShortResponseIsReported) {
  const auto f = ZeroPhaseFilter::design(1, 0.013);
  EXPECT_THROW(etea::impulse_response_cascade(f, etea::SparsifyingOperator(1, 0.999), 4096), etea::ResponseTooShort);
  EXPECT_THROW(etea::impulse_response_cascade(f, etea::SparsifyingOperator(1, 0.9), 4), etea::DimensionError);
}
