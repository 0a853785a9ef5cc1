#include "kselect/rational.hpp"

#include <stdexcept>

namespace kselect {

std::string fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

BigInt binomial_big(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (int i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

bool binomial_within(int n, int k, std::uint64_t limit, std::uint64_t& out) {
  const BigInt c = binomial_big(n, k);
  if (c > limit) return false;
  out = static_cast<std::uint64_t>(c);
  return true;
}

std::uint64_t pow_capped(std::uint64_t base, int exp, std::uint64_t limit) {
  std::uint64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && result > limit / base) return limit + 1;
    result *= base;
  }
  return result;
}

int ceil_cube_root(int k) {
  if (k < 1) throw std::invalid_argument("ceil_cube_root: k must be positive");
  int m = 1;
  while (static_cast<long long>(m) * m * m < k) ++m;
  return m;
}

}  // namespace kselect
