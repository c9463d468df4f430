#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace otm {

/// splitmix64 mixer — used both as a seed derivation hash and as the core of
/// the light per-point generator below.
inline std::uint64_t splitmix64_mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64_mix(splitmix64_mix(seed) ^ splitmix64_mix(index + 0x51ed270b8a4c1fb3ull));
}

struct Mt19937Engine {
  std::mt19937_64 gen;
  explicit Mt19937Engine(std::uint64_t seed) : gen(seed) {}
  std::uint64_t next() { return gen(); }
};

/// splitmix64 as a sequential generator: cheap to construct, which matters
/// because samplers build one engine per point index.
struct SplitMixEngine {
  std::uint64_t state;
  explicit SplitMixEngine(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }
};

/// Deterministic uniform/normal transforms over a raw 64-bit engine. The
/// std distributions are avoided because their sequences are not pinned by
/// the standard.
template <class Engine>
class BasicRng {
 public:
  explicit BasicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_.next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t uniform_index(std::uint64_t n) { return engine_.next() % n; }

  /// Standard normal via Box–Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  Engine engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

using Rng = BasicRng<Mt19937Engine>;
using PointRng = BasicRng<SplitMixEngine>;

}  // namespace otm
