#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "kselect/rational.hpp"

namespace kselect {

// Reproducibility contract: every randomized operation takes a 64-bit master
// seed and expands it with the scheme below. Identical seeds give identical
// results on every platform.
//
//   - stream seeds come from the splitmix64 finalizer applied to
//     master + GAMMA * (stream + 1), GAMMA = 0x9E3779B97F4A7C15;
//   - each stream drives a std::mt19937_64 (its output sequence is fully
//     specified by the C++ standard);
//   - bounded draws use rejection sampling on raw 64-bit outputs, never
//     std::uniform_int_distribution (which is implementation-defined).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, bound), bound >= 1.
  std::uint64_t below(std::uint64_t bound);
  int below_int(int bound) { return static_cast<int>(below(static_cast<std::uint64_t>(bound))); }

  // Uniform in [0, bound) for arbitrary-precision bounds, bound >= 1.
  BigInt below_big(const BigInt& bound);

  // Uniform in [0, 1) with 53 random bits.
  double unit_double();

  // Uniformly random r-subset of `pool`, as the first r slots of a partial
  // Fisher-Yates shuffle. Order of the result is the draw order.
  std::vector<int> sample_int(std::vector<int> pool, int r);

 private:
  std::mt19937_64 gen_;
};

}  // namespace kselect
