#include "doctest.h"

#include <random>

#include "testinv/errors.hpp"
#include "testinv/exactalg.hpp"
#include "testinv/heisenberg.hpp"

using namespace testinv;
using namespace testinv::heis;

namespace {

// dim_u = 1, dim_v = 2, psi(x, y) = x1*y2 - x2*y1
PolarizationForm symplectic_form()
{
    std::vector<Rat> t(1 * 2 * 2, Rat(0));
    t[0 * 2 + 1] = Rat(1);  // (i=0, j=1)
    t[1 * 2 + 0] = Rat(-1); // (i=1, j=0)
    return PolarizationForm(1, 2, t);
}

HeisenbergElement elem(std::initializer_list<const char*> u, std::initializer_list<const char*> v)
{
    HeisenbergElement w;
    for (const char* s : u)
        w.u.push_back(parse_rational(s));
    for (const char* s : v)
        w.v.push_back(parse_rational(s));
    return w;
}

Rat random_rat(std::mt19937_64& rng)
{
    std::uniform_int_distribution<long> num(-24, 24);
    std::uniform_int_distribution<long> den(1, 12);
    Rat q(num(rng), den(rng));
    q.canonicalize();
    return q;
}

HeisenbergElement random_elem(std::mt19937_64& rng, const PolarizationForm& psi)
{
    HeisenbergElement w;
    for (std::size_t i = 0; i < psi.dim_u(); ++i)
        w.u.push_back(random_rat(rng));
    for (std::size_t i = 0; i < psi.dim_v(); ++i)
        w.v.push_back(random_rat(rng));
    return w;
}

} // namespace

TEST_CASE("group law basics")
{
    PolarizationForm psi = symplectic_form();
    HeisenbergElement x = elem({"2/3"}, {"1/5", "-4"});
    CHECK(hmul(heis_identity(psi), x, psi) == x);
    CHECK(hmul(x, heis_identity(psi), psi) == x);

    // psi((1,0),(0,1)) = 1
    HeisenbergElement a = elem({"0"}, {"1", "0"});
    HeisenbergElement b = elem({"0"}, {"0", "1"});
    CHECK(hmul(a, b, psi) == elem({"1"}, {"1", "1"}));

    CHECK(hmul(x, hinv(x, psi), psi) == heis_identity(psi));
    CHECK(hinv(hinv(x, psi), psi) == x);
    CHECK(hinv(elem({"1"}, {"2", "3"}), psi) == elem({"-1"}, {"-2", "-3"}));
}

TEST_CASE("powers agree with repeated multiplication")
{
    PolarizationForm psi = symplectic_form();
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        HeisenbergElement w = random_elem(rng, psi);
        CHECK(hpow(w, Int(0), psi) == heis_identity(psi));
        CHECK(hpow(w, Int(5), psi).u[0] == 5 * w.u[0]);
        HeisenbergElement cubed = hmul(hmul(w, w, psi), w, psi);
        CHECK(hpow(w, Int(3), psi) == cubed);
        HeisenbergElement acc = heis_identity(psi);
        for (int n = 0; n <= 8; ++n) {
            CHECK(hpow(w, Int(n), psi) == acc);
            CHECK(hpow(w, Int(-n), psi) == hinv(acc, psi));
            acc = hmul(acc, w, psi);
        }
    }
}

TEST_CASE("associativity on random triples")
{
    PolarizationForm psi = symplectic_form();
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200; ++trial) {
        HeisenbergElement a = random_elem(rng, psi);
        HeisenbergElement b = random_elem(rng, psi);
        HeisenbergElement c = random_elem(rng, psi);
        CHECK(hmul(hmul(a, b, psi), c, psi) == hmul(a, hmul(b, c, psi), psi));
    }
}

TEST_CASE("non-alternating forms are rejected at construction")
{
    std::vector<Rat> bad(1 * 2 * 2, Rat(0));
    bad[0 * 2 + 1] = Rat(1);
    bad[1 * 2 + 0] = Rat(1); // symmetric, not antisymmetric
    CHECK_THROWS_AS(PolarizationForm(1, 2, bad), NotAlternating);

    std::vector<Rat> diag(1 * 2 * 2, Rat(0));
    diag[0 * 2 + 0] = Rat(1); // psi(v, v) != 0
    CHECK_THROWS_AS(PolarizationForm(1, 2, diag), NotAlternating);

    CHECK_THROWS_AS(hmul(HeisenbergElement{{Rat(0)}, {Rat(0)}}, HeisenbergElement{{}, {}},
                         symplectic_form()),
                    DimensionMismatch);
}

TEST_CASE("p-order drops by one under the p-th power")
{
    PolarizationForm psi = symplectic_form();
    exactalg::QLattice z3 = exactalg::QLattice::standard(3);
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<long> pick(0, 2);
    const long primes[] = {2, 3, 5};
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 60; ++trial) {
        HeisenbergElement w = random_elem(rng, psi);
        long p = primes[pick(rng)];
        long n = 1 + 2 * static_cast<long>(rng() % 3); // odd, so coprime to 2; adjust below
        if (n % p == 0)
            ++n;
        long before = exactalg::p_order_in_lattice(flatten(w), z3, Int(p));
        if (before < 1)
            continue;
        HeisenbergElement scaled = hpow(w, Int(p * n), psi);
        long after = exactalg::p_order_in_lattice(flatten(scaled), z3, Int(p));
        CHECK(after == before - 1);
        ++checked;
    }
    CHECK(checked >= 30);
}
