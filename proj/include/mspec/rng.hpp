#ifndef MSPEC_RNG_HPP
#define MSPEC_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>

namespace mspec {

// Counter-based generator: every output word is a stateless hash of
// (seed, stream, counter), so any sample or trial can be generated at a
// random access position.  Identical (seed, stream) always reproduces the
// same values regardless of threading or evaluation order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(splitmix64(seed) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  std::uint64_t word(std::uint64_t counter) const {
    return splitmix64(key_ ^ (counter * 0xD1B54A32D192ED03ULL));
  }

  /// Uniform in (0, 1]; never returns 0 so log() below stays finite.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(word(counter) >> 11) + 1.0) * 0x1p-53;
  }

  /// Uniform in [lo, hi).
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * (static_cast<double>(word(counter) >> 11) * 0x1p-53);
  }

  /// Standard Gaussian pair via Box-Muller from counters (2c, 2c+1).
  void gaussian_pair(std::uint64_t c, double& z0, double& z1) const {
    const double u1 = uniform(2 * c);
    const double u2 = uniform(2 * c + 1);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586477 * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
  }

  double gaussian(std::uint64_t c) const {
    double z0, z1;
    gaussian_pair(c, z0, z1);
    return z0;
  }

  /// Fills out with Gaussians using pair counters starting at base.
  /// Consumes ceil(len/2) pair counters.
  void gaussian_fill(std::span<double> out, std::uint64_t base) const {
    std::size_t i = 0;
    std::uint64_t c = base;
    while (i + 1 < out.size()) {
      gaussian_pair(c++, out[i], out[i + 1]);
      i += 2;
    }
    if (i < out.size()) {
      double z0, z1;
      gaussian_pair(c, z0, z1);
      out[i] = z0;
    }
  }

 private:
  std::uint64_t key_;
};

// Stream ids; keeps the independent sample stages on disjoint keys.
namespace rng_stream {
constexpr std::uint64_t kNetwork = 0;
constexpr std::uint64_t kSubspace = 1;
constexpr std::uint64_t kRegression = 2;
constexpr std::uint64_t kEval = 3;
constexpr std::uint64_t kNoise = 4;
constexpr std::uint64_t kTrial = 5;
}  // namespace rng_stream

}  // namespace mspec

#endif
