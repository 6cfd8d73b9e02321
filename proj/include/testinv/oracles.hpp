#pragma once

#include <cstdint>
#include <vector>

#include "testinv/numutil.hpp"

namespace testinv::oracles {

// Brute-force cross-checks, deliberately written against different
// characterizations than the library routines they validate. Nothing in
// here is called by the implementation modules.

/// Class number of d < 0 by scanning all triples (a,b,c) in the reduced box
/// and testing b^2 - 4ac = d directly.
long reduced_form_count_brute(long d);

/// Least positive Pell solution of x^2 - d y^2 = 1 found by walking y = 1, 2, ...
std::pair<Int, Int> pell_brute(long d, long y_limit = 10000000);

/// Exhaustive count of the units of Z[x]/(p^k, f) by enumerating every
/// element and testing invertibility by closure under multiplication with
/// the candidate (via the norm-free route: u unit iff u*v = 1 for some v).
Int unit_count_exhaustive(const Int& p, unsigned k, const std::vector<Int>& monic_min_poly);

/// Index of the unit-norm value set of the quadratic order of discriminant
/// d inside (Z/p^kZ)^×, by enumerating the norm form a^2 + abT + b^2N over
/// all residue pairs. Stops early once every unit is covered.
Int norm_value_index_exhaustive(long d, long p, unsigned k);

/// Number of cosets of the lattice spanned by the integer columns `basis`
/// inside Z^n, by enumerating a fundamental box and merging equivalent
/// points (membership by exhaustive small search).
Int coset_count_brute(const std::vector<std::vector<long>>& basis_columns);

/// Smallest m >= 0 with p^m * w inside the integer span of basis_columns,
/// p-locally, found by trying m = 0, 1, 2, ...
long p_order_brute(const std::vector<Rat>& w, const std::vector<std::vector<long>>& basis_columns,
                   long p, long m_limit = 64);

} // namespace testinv::oracles
