#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hyperbell {

// Deterministic random source. All distribution transforms are implemented
// here rather than taken from <random> so that sequences are identical across
// standard library implementations for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed), seed_base_(seed) {}

  // Derive an independent stream from this seed and a stream id. Mixing is
  // splitmix64 so that nearby ids do not produce correlated engines.
  Rng derive(std::uint64_t stream) const {
    std::uint64_t z = seed_mix(seed_base_ + 0x9e3779b97f4a7c15ULL * (stream + 1));
    return Rng(z, true);
  }

  std::uint64_t raw() { return eng_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double t = 2.0 * M_PI * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Poisson sampling: Knuth product-of-uniforms for small means, Hormann's
  // PTRS transformed rejection for large ones (O(1) per draw, exact law).
  long long poisson(double mean) {
    if (mean < 0.0) return 0;
    if (mean == 0.0) return 0;
    if (mean < 10.0) return poisson_knuth(mean);
    return poisson_ptrs(mean);
  }

 private:
  Rng(std::uint64_t mixed, bool) : eng_(mixed), seed_base_(mixed) {}

  static std::uint64_t seed_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  long long poisson_knuth(double mean) {
    double limit = std::exp(-mean);
    double p = 1.0;
    long long k = 0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    return k - 1;
  }

  long long poisson_ptrs(double mean) {
    double slam = std::sqrt(mean);
    double loglam = std::log(mean);
    double b = 0.931 + 2.53 * slam;
    double a = -0.059 + 0.02483 * b;
    double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      double u = uniform() - 0.5;
      double v = uniform();
      double us = 0.5 - std::fabs(u);
      double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= vr) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
          kf * loglam - mean - std::lgamma(kf + 1.0))
        return static_cast<long long>(kf);
    }
  }

  std::mt19937_64 eng_;
  std::uint64_t seed_base_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}
