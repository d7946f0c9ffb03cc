#pragma once

// Random streams for the simulator.
//
// Each stream is a std::mt19937_64 (its output sequence is fixed by the C++
// standard) seeded through SplitMix64 from (seed, replication, node), so a
// given configuration reproduces bit for bit on any conforming library.
// Uniforms use the top 53 bits; no std::*_distribution is involved.

#include <cstdint>
#include <random>

namespace fctl {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RandomStream {
 public:
  static constexpr int kVersion = 1;

  RandomStream(std::uint64_t seed, std::uint64_t replication, std::uint64_t node)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ replication) ^ (node + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace fctl
