#ifndef ETEA_SYNTH_HPP
#define ETEA_SYNTH_HPP

// Synthetic observations y = f + x + w: a sum-of-sinusoids baseline f,
// step-exponential (type 1) and protuberance (type 0) transients x, and
// seeded white Gaussian noise w.
//
// Noise is reproducible across platforms: std::mt19937_64 seeded with the
// SyntheticSpec::seed, each 64-bit draw mapped to a uniform in (0, 1) as
// ((draw >> 11) + 0.5) * 2^-53, and pairs of uniforms (u1, u2) converted by
// Box-Muller into sqrt(-2 ln u1) cos(2 pi u2), sqrt(-2 ln u1) sin(2 pi u2),
// consumed in that order.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "etea/error.hpp"

namespace etea {

/// Portable standard-normal source (see file comment for the exact recipe).
class GaussianSource {
public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class TransientType : int {
  protuberance = 0,  ///< c (k - n0 + 1) r^(k - n0), k >= n0
  step = 1,          ///< c r^(k - n0), k >= n0
};

struct Sinusoid {
  double amplitude = 0.0;
  double frequency = 0.0;  ///< cycles/sample
  double phase = 0.0;      ///< radians; sample k is amplitude * sin(2 pi frequency k + phase)
};

struct Transient {
  TransientType type = TransientType::step;
  std::size_t onset = 0;
  double amplitude = 1.0;
  double rate = 0.94;
};

struct SyntheticSpec {
  std::size_t n = 1000;
  std::vector<Sinusoid> baseline;
  std::vector<Transient> transients;
  double sigma_w = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    if (n == 0) throw ParameterError("synthetic length must be positive");
    if (!(sigma_w >= 0.0)) throw ParameterError("noise sigma must be >= 0");
    for (const auto& t : transients) {
      if (t.onset >= n) throw ParameterError("transient onset " + std::to_string(t.onset) + " outside signal");
      if (!(t.rate > 0.0 && t.rate < 1.0)) throw ParameterError("transient rate must lie in (0, 1)");
    }
  }

  /// Baseline shared by the presets: 1.0 sin at 0.002 and 0.5 sin at 0.005
  /// cycles/sample, both well below a 0.013 cutoff.
  static std::vector<Sinusoid> default_baseline() { return {{1.0, 0.002, 0.0}, {0.5, 0.005, 1.0}}; }

  /// Three step exponentials of alternating sign, r = 0.94, sigma_w = 0.20.
  static SyntheticSpec step_preset(std::uint64_t seed = 0) {
    SyntheticSpec s;
    s.n = 1000;
    s.baseline = default_baseline();
    s.transients = {{TransientType::step, 200, 2.0, 0.94},
                    {TransientType::step, 480, -1.5, 0.94},
                    {TransientType::step, 730, 1.8, 0.94}};
    s.sigma_w = 0.2;
    s.seed = seed;
    return s;
  }

  /// Protuberances of different heights and widths built from impulses
  /// driven through 1/(1 - r z^-1)^2 with r = 0.95. Peaks lie between about
  /// 3.8 and 7.5 (the response (n + 1) r^n peaks near 7.5 for r = 0.95).
  static SyntheticSpec protuberance_preset(std::uint64_t seed = 0) {
    SyntheticSpec s;
    s.n = 1000;
    s.baseline = default_baseline();
    constexpr double r = 0.95;
    s.transients = {{TransientType::protuberance, 120, 0.80, r},
                    {TransientType::protuberance, 330, -0.60, r},
                    {TransientType::protuberance, 345, -0.50, r},
                    {TransientType::protuberance, 560, 1.00, r},
                    {TransientType::protuberance, 760, 0.50, r},
                    {TransientType::protuberance, 790, 0.60, r}};
    s.sigma_w = 0.2;
    s.seed = seed;
    return s;
  }
};

struct SyntheticSignal {
  std::vector<double> y;
  std::vector<double> f;
  std::vector<double> x;
  std::vector<double> w;
};

inline std::vector<double> transient_waveform(const Transient& t, std::size_t n) {
  std::vector<double> x(n, 0.0);
  double decay = 1.0;
  for (std::size_t k = t.onset; k < n; ++k) {
    const double lag = static_cast<double>(k - t.onset);
    x[k] = t.type == TransientType::step ? t.amplitude * decay : t.amplitude * (lag + 1.0) * decay;
    decay *= t.rate;
  }
  return x;
}

inline SyntheticSignal generate(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  SyntheticSignal out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                      std::vector<double>(n, 0.0)};
  for (const auto& s : spec.baseline)
    for (std::size_t k = 0; k < n; ++k)
      out.f[k] += s.amplitude * std::sin(2.0 * std::numbers::pi * s.frequency * static_cast<double>(k) + s.phase);
  for (const auto& t : spec.transients) {
    const auto wave = transient_waveform(t, n);
    for (std::size_t k = 0; k < n; ++k) out.x[k] += wave[k];
  }
  GaussianSource gauss(spec.seed);
  for (std::size_t k = 0; k < n; ++k) out.w[k] = spec.sigma_w * gauss();
  for (std::size_t k = 0; k < n; ++k) out.y[k] = out.f[k] + out.x[k] + out.w[k];
  return out;
}

inline double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("rmse: length mismatch");
  if (a.empty()) throw DimensionError("rmse: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / static_cast<double>(a.size()));
}

} // namespace etea

#endif // ETEA_SYNTH_HPP
