#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace latact {

// Derives an independent stream seed from a base seed and a stream index
// (splitmix64 finalizer). Sampled audits hand each work item its own stream
// so results do not depend on evaluation order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Per-item substream within a named stream.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream,
                              std::uint64_t index) {
  return mix_seed(seed, (stream << 32) + index);
}

// Seeded random source. The engine is mt19937_64 (bit-exact by standard);
// the distribution transforms are hand-rolled because the standard library's
// distributions are implementation-defined, which would make seeded reports
// differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the polar method.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u = 0.0, v = 0.0, s = 0.0;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  // Uniform integer in [0, n). n must be positive.
  int below(int n) {
    return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream tags for mix_seed, one per consumer of a user-facing seed.
namespace seed_stream {
inline constexpr std::uint64_t kWeightInit = 1;
inline constexpr std::uint64_t kShuffle = 2;
inline constexpr std::uint64_t kOrderTriples = 3;
inline constexpr std::uint64_t kAuditInputs = 4;
inline constexpr std::uint64_t kBasis = 5;
}  // namespace seed_stream

}  // namespace latact
