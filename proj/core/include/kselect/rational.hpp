#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace kselect {

// Exact arithmetic for selection probabilities. Everything probabilistic in
// the library is computed in these types; no floating point enters the exact
// paths. cpp_rational keeps values in lowest terms with positive denominator.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Canonical "num/den" rendering; the denominator is always printed, even for
// integers ("3/1"), so serialized probabilities are uniform.
std::string fraction_string(const Rational& r);

BigInt binomial_big(int n, int k);

// C(n, k) if it fits below `limit`, otherwise nullopt semantics via return.
bool binomial_within(int n, int k, std::uint64_t limit, std::uint64_t& out);

// floor(n^exp) capped at `limit + 1` to keep overflow checks simple.
std::uint64_t pow_capped(std::uint64_t base, int exp, std::uint64_t limit);

// Smallest m with m^3 >= k (k >= 1).
int ceil_cube_root(int k);

}  // namespace kselect
