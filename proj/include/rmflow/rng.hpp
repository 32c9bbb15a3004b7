#pragma once

#include <cstdint>
#include <random>

namespace rmflow {

// splitmix64 finalizer; used to decorrelate (base_seed, replica) pairs.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded normal stream.  Copying a stream copies its full state, so two
// copies produce identical draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t index = 0)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x5851f42d4c957f2dULL))) {}

  double normal() { return normal_(engine_); }
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::mt19937_64& engine() { return engine_; }

  friend bool operator==(const RngStream& a, const RngStream& b) {
    return a.engine_ == b.engine_ && a.normal_ == b.normal_;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace rmflow
