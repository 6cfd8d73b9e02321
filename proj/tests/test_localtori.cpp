#include "doctest.h"

#include <deque>
#include <set>

#include "testinv/errors.hpp"
#include "testinv/localtori.hpp"
#include "testinv/oracles.hpp"

using namespace testinv;
using namespace testinv::localtori;

namespace {

LocalFieldFactor quad(long d)
{
    return LocalFieldFactor::from_field(fields::AbelianFieldSpec::quadratic(d));
}

} // namespace

TEST_CASE("unit group generators close to the full unit quotient")
{
    // Q at p = 5, k = 2: (Z/25)^x has order 20
    LocalUnitGroup q52 = unit_group_generators(LocalFieldFactor::rational(), Int(5), 2);
    CHECK(q52.order == 20);
    CHECK(generator_closure_order(q52) == 20);
    CHECK(oracles::unit_count_exhaustive(Int(5), 2, {Int(0), Int(1)}) == 20);

    // Q at p = 2, k = 3: (Z/8)^x has order 4
    LocalUnitGroup q23 = unit_group_generators(LocalFieldFactor::rational(), Int(2), 3);
    CHECK(q23.order == 4);
    CHECK(generator_closure_order(q23) == 4);

    // Q(i) at p = 3 (inert), k = 2: |(O/9)^x| = 72
    LocalUnitGroup qi32 = unit_group_generators(quad(-4), Int(3), 2);
    CHECK(qi32.order == 72);
    CHECK(generator_closure_order(qi32) == 72);
    CHECK(oracles::unit_count_exhaustive(Int(3), 2, {Int(1), Int(0), Int(1)}) == 72);
    REQUIRE(qi32.blocks.size() == 1);
    CHECK(qi32.blocks[0] == std::pair<unsigned long, unsigned long>{1, 2});

    // ramified and split cases against the exhaustive count
    LocalUnitGroup qi22 = unit_group_generators(quad(-4), Int(2), 2);
    CHECK(qi22.order == generator_closure_order(qi22));
    CHECK(qi22.order == oracles::unit_count_exhaustive(Int(2), 2, {Int(1), Int(0), Int(1)}));
    LocalUnitGroup qi52 = unit_group_generators(quad(-4), Int(5), 2);
    CHECK(qi52.order == generator_closure_order(qi52));
    CHECK(qi52.blocks.size() == 2);

    // a cyclotomic block: Z[zeta_5] at p = 2, k = 1 has (O/2)^x of order 15
    LocalFieldFactor z5 = LocalFieldFactor::from_field(fields::AbelianFieldSpec::cyclotomic(5));
    LocalUnitGroup c521 = unit_group_generators(z5, Int(2), 1);
    CHECK(c521.order == 15);
    CHECK(generator_closure_order(c521) == 15);
}

TEST_CASE("norm image index")
{
    CHECK(norm_image_index(LocalFieldFactor::rational(), Int(5), 2, 10) == 1);
    CHECK(norm_image_index(quad(-4), Int(3), 2, 10) == 1); // unramified units surject
    CHECK(norm_image_index(quad(-4), Int(2), 2, 10) == 2); // a^2+b^2 ≡ 1 mod 4

    // oracle: exhaustive norm enumeration mod p^4
    CHECK(oracles::norm_value_index_exhaustive(-4, 2, 4) == 2);
    CHECK(oracles::norm_value_index_exhaustive(-4, 3, 4) == 1);
    CHECK(oracles::norm_value_index_exhaustive(8, 2, 4) ==
          norm_image_index(quad(8), Int(2), 2, 10));

    // local-CFT bound on a sample (the acceptance suite runs the full table)
    for (long d : {-4L, -3L, 8L}) {
        for (long p : {2L, 3L, 5L}) {
            Int idx = norm_image_index(quad(d), Int(p), 2, 10);
            fields::LocalSplitting s = fields::local_splitting(fields::AbelianFieldSpec::quadratic(d), Int(p));
            CHECK(idx <= Int(static_cast<long>(s.e * s.f)));
            if (s.e == 1)
                CHECK(idx == 1);
        }
    }
}

TEST_CASE("scaling index closed form")
{
    CHECK(scaling_index_closed_form(Int(7), 0) == 1);
    CHECK(scaling_index_closed_form(Int(3), 2) == 6);
    CHECK(scaling_index_closed_form(Int(2), 3) == 4);
}

TEST_CASE("character image")
{
    // identity on G_m: full unit group
    CharacterImage full = character_image(LocalFieldFactor::rational(), 1, Int(5), 2);
    CHECK(full.index == 1);

    // squares have index 2 for odd p
    CharacterImage sq = character_image(LocalFieldFactor::rational(), 2, Int(5), 2);
    CHECK(sq.index == 2);
    CharacterImage sq7 = character_image(LocalFieldFactor::rational(), 2, Int(7), 3);
    CHECK(sq7.index == 2);

    // norm of Q(i) at p = 2: the 1 mod 4 subgroup
    CharacterImage nm = character_image(quad(-4), 1, Int(2), 4);
    CHECK(nm.index == norm_image_index(quad(-4), Int(2), 2, 10));

    // inverse characters give the same image
    CharacterImage inv_img = character_image(LocalFieldFactor::rational(), -2, Int(5), 2);
    CHECK(inv_img.index == sq.index);
}

TEST_CASE("stabilizer index via orbit closure")
{
    std::vector<LocalFieldFactor> gm{LocalFieldFactor::rational()};

    // split scaling with 3-order 2 matches the closed form
    std::vector<LocalConstraint> c1{{{{0, 1}}, 2}};
    CHECK(stabilizer_index(gm, c1, 0, Int(3), 4) == 6);
    CHECK(stabilizer_index(gm, c1, 0, Int(3), 4) == scaling_index_closed_form(Int(3), 2));

    // all depths zero
    std::vector<LocalConstraint> c0{{{{0, 1}}, 0}};
    CHECK(stabilizer_index(gm, c0, 0, Int(5), 2) == 1);

    // norm character of Q(i), depth 2 at p = 2: all unit norms are 1 mod 4
    std::vector<LocalFieldFactor> qi{quad(-4)};
    std::vector<LocalConstraint> cn{{{{0, 1}}, 2}};
    CHECK(stabilizer_index(qi, cn, 0, Int(2), 4) == 1);

    // closed form across primes and depths (acceptance runs the full table)
    for (long p : {2L, 3L, 5L}) {
        for (unsigned m = 0; m <= 3; ++m) {
            std::vector<LocalConstraint> c{{{{0, 1}}, m}};
            CHECK(stabilizer_index(gm, c, 0, Int(p), m + 2) ==
                  scaling_index_closed_form(Int(p), m));
        }
    }

    // level congruence only: index of the 1-units of depth m
    CHECK(stabilizer_index(gm, {}, 2, Int(3), 4) == 6);
    CHECK(stabilizer_index(qi, {}, 1, Int(3), 3) == 8); // |(O/3)^x| for inert 3

    // level and character combine through the maximum depth
    std::vector<LocalConstraint> c2{{{{0, 1}}, 1}};
    CHECK(stabilizer_index(gm, c2, 2, Int(3), 4) == 6);
    CHECK(stabilizer_index(gm, c1, 1, Int(3), 4) == 6);

    // square character: the image mod 5 is the two squares {1, 4}
    std::vector<LocalConstraint> csq{{{{0, 2}}, 1}};
    CHECK(stabilizer_index(gm, csq, 0, Int(5), 3) == 2);
}

TEST_CASE("multi-factor stabilizers")
{
    // G_m x Res_{Q(i)}: a product character t^2 * Nm(s)
    std::vector<LocalFieldFactor> both{LocalFieldFactor::rational(), quad(-4)};
    std::vector<LocalConstraint> c{{{{0, 1}, {1, 1}}, 1}};
    Int idx = stabilizer_index(both, c, 0, Int(5), 3);
    // image of (t, s) -> t * Nm(s) mod 5 is everything, index = (5-1)*5^0
    CHECK(idx == 4);

    // separate constraints on separate factors multiply
    std::vector<LocalConstraint> c2{{{{0, 1}}, 1}, {{{1, 1}}, 1}};
    Int idx2 = stabilizer_index(both, c2, 0, Int(5), 3);
    CHECK(idx2 == 16); // 4 * 4: split 5 in Q(i) has surjective norms mod 5
}

TEST_CASE("precision guards")
{
    std::vector<LocalFieldFactor> gm{LocalFieldFactor::rational()};
    std::vector<LocalConstraint> c{{{{0, 1}}, 3}};
    CHECK_THROWS_AS(stabilizer_index(gm, c, 0, Int(3), 1), ValidationError);
    CHECK_THROWS_AS(unit_group_generators(LocalFieldFactor::rational(), Int(4), 2), ValidationError);
    CHECK_THROWS_AS(ResidueRing(Int(2), 63, {Int(0), Int(1)}), Unsupported);
}
