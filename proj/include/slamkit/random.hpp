#pragma once

#include <cstdint>
#include <random>

namespace slamkit {

/// Mixes a base seed with a salt into a well-spread 64-bit stream seed
/// (splitmix64 finalizer). Used to derive independent streams per Monte
/// Carlo run and per consumer without correlated low bits.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random stream; one instance per independent consumer.
/// Identical seeds reproduce identical draw sequences.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double gauss() { return normal_(engine_); }
  double gauss(double sigma) { return sigma * normal_(engine_); }
  double uniform() { return uniform_(engine_); }  // [0, 1)

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace slamkit
