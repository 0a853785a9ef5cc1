#include "kselect/rng.hpp"

#include <cassert>
#include <limits>

namespace kselect {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  assert(bound >= 1);
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  // 2^64 mod bound; values >= 2^64 - rem would bias the modulus and are
  // rejected.
  const std::uint64_t rem = (max % bound + 1) % bound;
  if (rem == 0) return next_u64() % bound;
  const std::uint64_t cutoff = max - rem;  // inclusive upper bound of accepted draws
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x > cutoff);
  return x % bound;
}

BigInt Rng::below_big(const BigInt& bound) {
  assert(bound >= 1);
  const unsigned bits = boost::multiprecision::msb(bound) + 1;
  const unsigned words = (bits + 63) / 64;
  while (true) {
    BigInt x = 0;
    for (unsigned w = 0; w < words; ++w) {
      x <<= 64;
      x |= BigInt(next_u64());
    }
    x >>= (words * 64 - bits);
    if (x < bound) return x;
  }
}

double Rng::unit_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::vector<int> Rng::sample_int(std::vector<int> pool, int r) {
  assert(r >= 0 && r <= static_cast<int>(pool.size()));
  for (int i = 0; i < r; ++i) {
    const std::uint64_t j = i + below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(r);
  return pool;
}

}  // namespace kselect
