#include "doctest.h"

#include <cstdio>

#include "testinv/errors.hpp"
#include "testinv/fields.hpp"
#include "testinv/oracles.hpp"

using namespace testinv;
using namespace testinv::fields;

TEST_CASE("conductor-discriminant formula")
{
    CHECK(abelian_field_discriminant(AbelianFieldSpec::rationals()) == 1);
    CHECK(abelian_field_discriminant(AbelianFieldSpec::quadratic(-4)) == 4);
    CHECK(abelian_field_discriminant(AbelianFieldSpec::cyclotomic(5)) == 125);

    // full subgroup fixes Q
    AbelianFieldSpec trivial(5, {1, 2, 3, 4});
    CHECK(trivial.degree() == 1);
    CHECK(abelian_field_discriminant(trivial) == 1);

    for (long d : {-3L, -4L, -7L, -8L, -11L, 5L, 8L, 12L, 13L}) {
        AbelianFieldSpec f = AbelianFieldSpec::quadratic(d);
        CHECK(abelian_field_discriminant(f) == Int(std::labs(d)));
        CHECK(f.quadratic_discriminant() == d);
    }
}

TEST_CASE("cyclotomic polynomial discriminant oracle")
{
    CHECK(cyclotomic_poly_disc_oracle(3) == 3);
    CHECK(cyclotomic_poly_disc_oracle(4) == 4);
    CHECK(cyclotomic_poly_disc_oracle(5) == 125);
    for (unsigned long n : {3UL, 4UL, 5UL, 7UL, 8UL, 9UL, 11UL, 12UL}) {
        CHECK(abelian_field_discriminant(AbelianFieldSpec::cyclotomic(n)) ==
              cyclotomic_poly_disc_oracle(n));
    }
}

TEST_CASE("compositum")
{
    AbelianFieldSpec qi = AbelianFieldSpec::quadratic(-4);
    AbelianFieldSpec q3 = AbelianFieldSpec::quadratic(-3);
    AbelianFieldSpec comp = AbelianFieldSpec::compositum(qi, q3);
    CHECK(comp.degree() == 4);
    // Q(i, sqrt(-3)) = Q(zeta_12), checked against the resultant route
    CHECK(abelian_field_discriminant(comp) == cyclotomic_poly_disc_oracle(12));
    CHECK(abelian_field_discriminant(comp) == 144);
}

TEST_CASE("imaginary quadratic class numbers")
{
    CHECK(quadratic_class_number(Int(-4)) == 1);
    CHECK(quadratic_class_number(Int(-23)) == 3);
    CHECK(quadratic_class_number(Int(-47)) == 5);
    for (long d : {-3L, -4L, -7L, -8L, -11L})
        CHECK(quadratic_class_number(Int(d)) == 1);
    for (long d : {-15L, -20L, -23L, -31L, -47L, -71L, -84L}) {
        CHECK(quadratic_class_number(Int(d)) == Int(oracles::reduced_form_count_brute(d)));
        CHECK(quadratic_class_number(Int(d)) >= 1);
    }
    CHECK_THROWS_AS(quadratic_class_number(Int(-12)), NotFundamental); // 4*(-3), not fundamental
    CHECK_THROWS_AS(quadratic_class_number(Int(5)), NotFundamental);
}

TEST_CASE("real quadratic class numbers")
{
    CHECK(real_quadratic_class_number(5) == 1);
    CHECK(real_quadratic_class_number(8) == 1);
    CHECK(real_quadratic_class_number(12) == 1);
    CHECK(real_quadratic_class_number(13) == 1);
    CHECK(real_quadratic_class_number(40) == 2);  // Q(sqrt 10)
    CHECK(real_quadratic_class_number(60) == 2);  // Q(sqrt 15)
    CHECK_THROWS_AS(real_quadratic_class_number(20), NotFundamental); // 4*5 with 5 ≡ 1 (4)
    CHECK_THROWS_AS(real_quadratic_class_number(204), Unsupported); // fundamental, > 200
}

TEST_CASE("pell fundamental solutions")
{
    auto check = [](long d, long x, long y) {
        PellSolution s = pell_fundamental(Int(d));
        CHECK(s.x == x);
        CHECK(s.y == y);
        auto [bx, by] = oracles::pell_brute(d);
        CHECK(s.x == bx);
        CHECK(s.y == by);
    };
    check(2, 3, 2);
    check(3, 2, 1);
    check(5, 9, 4);
    check(6, 5, 2);
    check(7, 8, 3);
    check(10, 19, 6);
    // large fundamental solution, equation check only
    PellSolution big = pell_fundamental(Int(61));
    CHECK(big.x == Int("1766319049"));
    CHECK(big.y == Int("226153980"));
    CHECK_THROWS_AS(pell_fundamental(Int(9)), SquareInput);
    CHECK_THROWS_AS(pell_fundamental(Int(1)), SquareInput);
}

TEST_CASE("local splitting")
{
    AbelianFieldSpec qi = AbelianFieldSpec::quadratic(-4);
    LocalSplitting at5 = local_splitting(qi, Int(5));
    CHECK((at5.e == 1 && at5.f == 1 && at5.g == 2));
    LocalSplitting at3 = local_splitting(qi, Int(3));
    CHECK((at3.e == 1 && at3.f == 2 && at3.g == 1));
    LocalSplitting at2 = local_splitting(qi, Int(2));
    CHECK((at2.e == 2 && at2.f == 1 && at2.g == 1));

    for (long d : {-3L, -4L, 5L, 8L, 12L, -7L, -8L}) {
        AbelianFieldSpec f = AbelianFieldSpec::quadratic(d);
        for (long p : {2L, 3L, 5L, 7L, 11L, 13L}) {
            LocalSplitting s = local_splitting(f, Int(p));
            CHECK(s.e * s.f * s.g == f.degree());
            CHECK((s.e > 1) == (std::labs(d) % p == 0));
        }
    }

    // cyclotomic: 5 ramifies fully in Q(zeta_5), 2 has order 4 mod 5
    AbelianFieldSpec z5 = AbelianFieldSpec::cyclotomic(5);
    LocalSplitting s5 = local_splitting(z5, Int(5));
    CHECK((s5.e == 4 && s5.f == 1 && s5.g == 1));
    LocalSplitting s2 = local_splitting(z5, Int(2));
    CHECK((s2.e == 1 && s2.f == 4 && s2.g == 1));
}

TEST_CASE("subgroup validation")
{
    CHECK_THROWS_AS(AbelianFieldSpec(8, {1, 2}), InvalidSubgroup);  // 2 not a unit
    CHECK_THROWS_AS(AbelianFieldSpec(8, {3}), InvalidSubgroup);     // missing 1
    CHECK_THROWS_AS(AbelianFieldSpec(12, {1, 5, 7}), InvalidSubgroup); // not closed
    CHECK_NOTHROW(AbelianFieldSpec(12, {1, 5}));
    CHECK_THROWS_AS(AbelianFieldSpec::quadratic(10), NotFundamental);
}

TEST_CASE("cache round trip")
{
    FieldCache cache;
    cache.put_class_number(Int(-23), Int(3));
    cache.put_discriminant("4:1", Int(4));
    std::string path = "testinv_cache_test.txt";
    cache.save(path);

    FieldCache loaded;
    loaded.load(path);
    CHECK(loaded.get_class_number(Int(-23)) == Int(3));
    CHECK(loaded.get_discriminant("4:1") == Int(4));
    CHECK(!loaded.get_class_number(Int(-4)).has_value());
    std::remove(path.c_str());

    FieldCache missing;
    missing.load("does_not_exist_cache.txt");
    CHECK(!missing.get_class_number(Int(-23)).has_value());
}
