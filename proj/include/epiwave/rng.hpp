#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace epiwave {

// Deterministic 64-bit stream (splitmix64 core). All randomness in the
// library flows through this type so that runs are byte-reproducible for a
// given root seed, independent of the standard library's distribution
// implementations. Substreams are derived by mixing, never by sharing state,
// which keeps parallel per-particle execution identical to sequential.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1], usable inside logs.
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller; stateless between calls so substream
  // hand-offs cannot desynchronize a cached spare deviate.
  double normal() {
    double u1 = uniform_pos();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  double normal(double mean, double std) { return mean + std * normal(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::uint64_t state_;
};

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Rng r(a ^ (0x632be59bd9b4e019ULL + (b << 1)));
  r.next_u64();
  return r.next_u64() ^ b;
}

// Named substream derivation: one root seed, stable stream per component.
inline std::uint64_t seed_for(std::uint64_t root, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the tag
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(root, h);
}

// Per-particle, per-day substream used by the ensemble operations.
inline std::uint64_t seed_for(std::uint64_t base, std::uint64_t day, std::uint64_t index) {
  return mix_seed(mix_seed(base, day + 1), index + 1);
}

}  // namespace epiwave
