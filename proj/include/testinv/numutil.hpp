#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace testinv {

using Int = mpz_class;
using Rat = mpq_class;

bool is_prime(const Int& n);

// Distinct prime factors of |n| in ascending order; n must be nonzero.
std::vector<Int> distinct_prime_factors(Int n);

// Exponent of p in n; n must be nonzero, p >= 2.
long valuation(const Int& n, const Int& p);

// Exponent of p in r (negative when p divides the denominator); r nonzero.
long valuation(const Rat& r, const Int& p);

Int ipow(const Int& base, unsigned long exp);

// Floor division and the matching nonnegative-remainder reduction.
Int floor_quot(const Int& a, const Int& b);

// All primes <= bound, ascending.
std::vector<long> primes_up_to(long bound);

// The first `count` primes 2, 3, 5, ...
std::vector<long> first_primes(std::size_t count);

// Parses "a" or "a/b" with optional leading '-'; throws ParseError.
Rat parse_rational(const std::string& token);
Int parse_integer(const std::string& token);

// Canonical decimal form, "a" or "a/b" with b > 1.
std::string rat_str(const Rat& r);

// Conversion with range check.
unsigned long to_ulong(const Int& n);
long to_long(const Int& n);

} // namespace testinv
