#include "doctest.h"

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "testinv/errors.hpp"
#include "testinv/invariants.hpp"

using namespace testinv;
using namespace testinv::inv;
using namespace testinv::testutil;
using exactalg::QVec;

namespace {

std::vector<Int> primes_from(std::initializer_list<long> ps)
{
    std::vector<Int> out;
    for (long p : ps)
        out.emplace_back(p);
    return out;
}

} // namespace

TEST_CASE("decompose_scaling groups by character")
{
    SubvarietyDatum d = mixed_datum(Rat(0), {Rat(0), Rat(0)});
    auto merged = decompose_scaling(d.torus, d.action);
    CHECK(merged.size() == 2);

    // equal characters merge
    SubvarietyDatum d2 = split_scaling_datum(Rat(0));
    d2.psi = heis::PolarizationForm::zero(2, 0);
    d2.w = heis::HeisenbergElement{{Rat(0), Rat(0)}, {}};
    d2.action.clear();
    for (std::size_t i = 0; i < 2; ++i) {
        ActionBlock b;
        b.in_u = true;
        b.coords = {i};
        b.chi.components.push_back(CharacterComponent{0, false, {1}, 0});
        d2.action.push_back(b);
    }
    auto merged2 = decompose_scaling(d2.torus, d2.action);
    REQUIRE(merged2.size() == 1);
    CHECK(merged2[0].block_indices == std::vector<std::size_t>{0, 1});

    // trivial characters are rejected
    SubvarietyDatum bad = split_scaling_datum(Rat(0));
    bad.action[0].chi.components[0].exponents = {0};
    CHECK_THROWS_AS(decompose_scaling(bad.torus, bad.action), TrivialSubrepresentation);
}

TEST_CASE("splitting discriminant of a torus")
{
    TorusSpec split{{TorusFactor::split(3)}, std::nullopt};
    CHECK(splitting_discriminant(split) == 1);

    TorusSpec qi{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(-4))}, std::nullopt};
    CHECK(splitting_discriminant(qi) == 4);

    TorusSpec prod{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(-4)),
                    TorusFactor::weil(fields::AbelianFieldSpec::quadratic(-3))},
                   std::nullopt};
    CHECK(splitting_discriminant(prod) == 144);
    CHECK(splitting_discriminant(prod) == fields::cyclotomic_poly_disc_oracle(12));

    fields::FieldCache cache;
    CHECK(splitting_discriminant(prod, &cache) == 144);
    CHECK(cache.get_discriminant("12:1").has_value());
}

TEST_CASE("defect primes")
{
    LevelSpec maximal;
    auto [d1, e1] = defect_primes(split_scaling_datum(Rat(1, 6)), maximal);
    CHECK(d1 == primes_from({2, 3}));
    CHECK(e1 == primes_from({2, 3}));

    auto [d2, e2] = defect_primes(split_scaling_datum(Rat(7)), maximal);
    CHECK(d2.empty());
    CHECK(e2.empty());

    LevelSpec with_depth;
    with_depth.set_t_depth(Int(5), 1);
    auto [d3, e3] = defect_primes(split_scaling_datum(Rat(3)), with_depth);
    CHECK(d3 == primes_from({5}));
    CHECK(e3.empty());
}

TEST_CASE("unipotent index I")
{
    LevelSpec maximal;
    BoundConstants c1;
    CHECK(unipotent_index_I(split_scaling_datum(Rat(1, 3)), maximal, Int(3), c1) == Rat(2));

    BoundConstants c2;
    c2.b = Rat(2);
    CHECK(unipotent_index_I(split_scaling_datum(Rat(1, 3)), maximal, Int(3), c2) == Rat(4));

    // norm character, depth 2 at p = 2: index 1, so I = b
    SubvarietyDatum qi = weil_norm_datum(-4, {Rat(1, 4), Rat(0)});
    CHECK(unipotent_index_I(qi, maximal, Int(2), c1) == Rat(1));
    CHECK(unipotent_index_I(qi, maximal, Int(2), c2) == Rat(2));

    CHECK_THROWS_AS(unipotent_index_I(split_scaling_datum(Rat(1, 3)), maximal, Int(5), c1),
                    ValidationError);
}

TEST_CASE("minimize over coset")
{
    LevelSpec maximal;
    heis::PolarizationForm psi2 = heis::PolarizationForm::zero(0, 2);
    heis::HeisenbergElement w{{}, {Rat(1, 4), Rat(1, 3)}};

    // W' = 0 keeps w
    auto keep = minimize_over_coset(w, {}, maximal, psi2);
    CHECK(keep.w_min == w);
    CHECK(keep.orders.at(Int(2)) == 2);
    CHECK(keep.orders.at(Int(3)) == 1);

    // W' = W minimizes to zero
    std::vector<QVec> full{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    auto zero = minimize_over_coset(w, full, maximal, psi2);
    CHECK(zero.w_min == heis::HeisenbergElement{{}, {Rat(0), Rat(0)}});
    CHECK(zero.orders.at(Int(2)) == 0);
    CHECK(zero.orders.at(Int(3)) == 0);

    // W' = Q x {0}: the 2-order is absorbed, the 3-order survives
    std::vector<QVec> line{{Rat(1), Rat(0)}};
    auto mixed = minimize_over_coset(w, line, maximal, psi2);
    CHECK(mixed.w_min == heis::HeisenbergElement{{}, {Rat(0), Rat(1, 3)}});
    CHECK(mixed.orders.at(Int(2)) == 0);
    CHECK(mixed.orders.at(Int(3)) == 1);
}

TEST_CASE("minimize over coset agrees with a brute-force scan")
{
    LevelSpec maximal;
    heis::PolarizationForm psi2 = heis::PolarizationForm::zero(0, 2);
    std::mt19937_64 rng(90210);
    std::uniform_int_distribution<long> num(-12, 12);
    std::uniform_int_distribution<long> den_pick(0, 3);
    const long dens[] = {1, 2, 3, 9};
    std::uniform_int_distribution<long> bvals(-3, 3);

    for (int trial = 0; trial < 25; ++trial) {
        QVec w{Rat(num(rng), dens[den_pick(rng)]), Rat(num(rng), dens[den_pick(rng)])};
        for (Rat& q : w)
            q.canonicalize();
        QVec b{Rat(bvals(rng)), Rat(bvals(rng))};
        if (b[0] == 0 && b[1] == 0)
            b[0] = 1;
        heis::HeisenbergElement we{{}, w};
        auto res = minimize_over_coset(we, {b}, maximal, psi2);

        exactalg::PrimeLattices plats = maximal.w_lattices(2);
        for (const auto& [p, achieved] : res.orders) {
            long best = 1000;
            // scan w + (a/36) b over a dense grid of rational multiples
            for (long a = -144; a <= 144; ++a) {
                Rat c(a, 36);
                c.canonicalize();
                QVec cand = exactalg::add(w, exactalg::scale(c, b));
                best = std::min(best, exactalg::p_order_in_lattice(cand, plats.at(p), p));
            }
            CHECK(achieved == best);
        }
    }
}

TEST_CASE("test invariant headline values")
{
    LevelSpec maximal;
    BoundConstants consts;

    InvariantReport r0 = test_invariant(split_scaling_datum(Rat(0)), maximal, consts);
    CHECK(r0.tau == Rat(1));
    CHECK(r0.degenerate_D);
    CHECK(r0.Delta.empty());

    InvariantReport r3 = test_invariant(split_scaling_datum(Rat(1, 3)), maximal, consts);
    CHECK(r3.tau == Rat(2));
    CHECK(r3.D == 1);
    CHECK(r3.Delta == primes_from({3}));
    CHECK(r3.primes.at(Int(3)).index == 2);

    InvariantReport rqi = test_invariant(weil_norm_datum(-4, {Rat(0), Rat(0)}), maximal, consts);
    CHECK(rqi.tau == Rat(4));
    CHECK(rqi.D == 4);
    CHECK(rqi.Delta.empty());
    CHECK(!rqi.degenerate_D);
}

TEST_CASE("test invariant translation invariance")
{
    LevelSpec maximal;
    BoundConstants consts;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> lam(-6, 6);
    std::uniform_int_distribution<long> num(-10, 10);
    const long dens[] = {1, 2, 3, 4, 9, 5};
    std::uniform_int_distribution<long> den_pick(0, 5);

    for (int trial = 0; trial < 20; ++trial) {
        Rat wv(num(rng), dens[den_pick(rng)]);
        wv.canonicalize();
        SubvarietyDatum d = split_scaling_datum(wv);
        InvariantReport base = test_invariant(d, maximal, consts);

        SubvarietyDatum moved = d;
        moved.w = heis::hmul(heis::HeisenbergElement{{Rat(lam(rng))}, {}}, d.w, d.psi);
        InvariantReport shifted = test_invariant(moved, maximal, consts);
        CHECK(base.tau == shifted.tau);
        CHECK(base.Delta == shifted.Delta);

        // tau of the zero translate never exceeds tau of w
        SubvarietyDatum zeroed = d;
        zeroed.w = heis::heis_identity(d.psi);
        CHECK(test_invariant(zeroed, maximal, consts).tau <= base.tau);
    }
}

TEST_CASE("lower bound")
{
    LevelSpec maximal;
    BoundConstants consts;

    auto lb_split = lower_bound(split_scaling_datum(Rat(1, 3)), maximal, consts);
    CHECK(lb_split.degenerate);
    CHECK(lb_split.value == 0.0);

    auto lb_qi = lower_bound(weil_norm_datum(-4, {Rat(0), Rat(0)}), maximal, consts);
    CHECK(!lb_qi.degenerate);
    CHECK(lb_qi.value == doctest::Approx(std::pow(std::log(4.0), 2)).epsilon(1e-12));

    // same torus with one defect prime of index 2
    auto lb_mixed = lower_bound(mixed_datum(Rat(1, 3), {Rat(0), Rat(0)}), maximal, consts);
    CHECK(lb_mixed.value == doctest::Approx(2 * std::pow(std::log(4.0), 2)).epsilon(1e-12));
}

TEST_CASE("class number of a torus")
{
    TorusSpec split{{TorusFactor::split(2)}, std::nullopt};
    CHECK(class_number_T(split) == 1);

    TorusSpec w23{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(-23))}, std::nullopt};
    CHECK(class_number_T(w23) == 3);

    TorusSpec real10{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(40))}, std::nullopt};
    CHECK(class_number_T(real10) == 2);

    TorusSpec n1{{TorusFactor::norm_one(fields::AbelianFieldSpec::quadratic(5))}, std::nullopt};
    CHECK_THROWS_AS(class_number_T(n1), Unsupported);
    TorusSpec n1o{{TorusFactor::norm_one(fields::AbelianFieldSpec::quadratic(5))}, Int(7)};
    CHECK(class_number_T(n1o) == 7);

    TorusSpec zeta5{{TorusFactor::weil(fields::AbelianFieldSpec::cyclotomic(5))}, std::nullopt};
    CHECK_THROWS_AS(class_number_T(zeta5), Unsupported);

    fields::FieldCache cache;
    cache.put_class_number(Int(-23), Int(99)); // cache wins, by construction
    CHECK(class_number_T(w23, &cache) == 99);
}

TEST_CASE("upper bound")
{
    LevelSpec maximal;
    BoundConstants consts;

    auto ub0 = upper_bound(split_scaling_datum(Rat(0)), maximal, consts);
    CHECK(ub0.exact == Rat(1));
    CHECK(ub0.order_w == 1);

    auto ub3 = upper_bound(split_scaling_datum(Rat(1, 3)), maximal, consts);
    CHECK(ub3.exact == Rat(3));
    CHECK(ub3.d_exponent == 1);

    auto ub23 = upper_bound(weil_norm_datum(-23, {Rat(0), Rat(0)}), maximal, consts);
    CHECK(ub23.exact == Rat(3));
    CHECK(ub23.class_number == 3);

    BoundConstants scaled;
    scaled.c0 = Rat(5, 2);
    auto ubs = upper_bound(weil_norm_datum(-23, {Rat(0), Rat(0)}), maximal, scaled);
    CHECK(ubs.exact == Rat(15, 2));
}

TEST_CASE("intersect levels")
{
    LevelSpec maximal;
    CHECK(intersect_levels(maximal, {}) == maximal);
    CHECK(intersect_levels(maximal, {QVec{Rat(3)}, QVec{Rat(-7)}}) == maximal);

    std::vector<QVec> ws{QVec{Rat(1, 3)}, QVec{Rat(2, 9)}};
    LevelSpec deepened = intersect_levels(maximal, ws);
    CHECK(deepened.t_depth_at(Int(3)) == 2);
    CHECK(deepened.t_depth_at(Int(2)) == 0);

    // afterwards no w-induced defects survive
    for (const QVec& w : ws) {
        SubvarietyDatum d = split_scaling_datum(w[0]);
        auto [big, small] = defect_primes(d, deepened);
        CHECK(small.empty());
        CHECK(!big.empty());
    }
}

TEST_CASE("classify sequences")
{
    BoundConstants consts;
    LevelSpec maximal;

    std::vector<std::pair<SubvarietyDatum, LevelSpec>> family;
    std::vector<long> ps = first_primes(20);
    for (long p : ps)
        family.emplace_back(split_scaling_datum(Rat(1, p)), maximal);

    ClassifyResult res = classify_sequence(family, Rat(10), consts);
    CHECK(!res.bounded);
    CHECK(res.max_tau == Rat(70)); // tau at p = 71
    CHECK(res.classes.size() == 20);
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(res.taus[i] == Rat(ps[i] - 1));

    // small denominators stay bounded with few classes
    std::vector<std::pair<SubvarietyDatum, LevelSpec>> smalls;
    for (const Rat& w : {Rat(0), Rat(1, 2), Rat(1, 3)})
        smalls.emplace_back(split_scaling_datum(w), maximal);
    ClassifyResult rs = classify_sequence(smalls, Rat(2), consts);
    CHECK(rs.bounded);
    CHECK(rs.max_tau == Rat(2));
    CHECK(rs.classes.size() == 3);

    // permutation and duplication do not change the observable outputs
    std::vector<std::pair<SubvarietyDatum, LevelSpec>> shuffled{smalls[2], smalls[0], smalls[1],
                                                                smalls[2]};
    ClassifyResult rs2 = classify_sequence(shuffled, Rat(2), consts);
    CHECK(rs2.bounded == rs.bounded);
    CHECK(rs2.max_tau == rs.max_tau);
    REQUIRE(rs2.classes.size() == rs.classes.size());
    for (std::size_t i = 0; i < rs.classes.size(); ++i) {
        CHECK(rs2.classes[i].signature == rs.classes[i].signature);
        CHECK(rs2.classes[i].w_class == rs.classes[i].w_class);
    }
}

TEST_CASE("level-only defects keep the cp lower bound")
{
    BoundConstants consts;
    for (long p : {2L, 3L, 5L, 7L}) {
        for (unsigned t = 1; t <= 3; ++t) {
            LevelSpec level;
            level.set_t_depth(Int(p), t);
            SubvarietyDatum d = split_scaling_datum(Rat(1)); // integral w
            InvariantReport rep = defect_report(d, level, consts);
            REQUIRE(rep.Delta == std::vector<Int>{Int(p)});
            CHECK(rep.delta.empty());
            // I_p / b >= p (1 - 1/p) for p in Delta \ delta with t_depth >= 1
            CHECK(rep.primes.at(Int(p)).I / consts.b >= Rat(p - 1));
            CHECK(rep.primes.at(Int(p)).index == localtori::scaling_index_closed_form(Int(p), t));
        }
    }
}

TEST_CASE("index chain bound")
{
    LevelSpec maximal;
    std::mt19937_64 rng(1618);
    std::uniform_int_distribution<long> num(-10, 10);
    const long dens[] = {1, 2, 3, 4, 5, 9, 13};
    std::uniform_int_distribution<long> den_pick(0, 6);
    for (int trial = 0; trial < 15; ++trial) {
        Rat wv(num(rng), dens[den_pick(rng)]);
        wv.canonicalize();
        SubvarietyDatum d = split_scaling_datum(wv);
        Int chain = level_relative_index(d, maximal);
        Int ord = exactalg::order_in_lattice(heis::flatten(d.w), maximal.w_lattices(1));
        CHECK(chain <= ord); // (dim W)^2 = 1
    }
}

TEST_CASE("norm-one factors reject characters and deep levels")
{
    SubvarietyDatum d = split_scaling_datum(Rat(1, 2));
    d.torus.factors.push_back(TorusFactor::norm_one(fields::AbelianFieldSpec::quadratic(5)));
    d.torus.class_number_override = Int(1);
    LevelSpec maximal;
    CHECK_NOTHROW(test_invariant(d, maximal, BoundConstants{}));

    LevelSpec deep;
    deep.set_t_depth(Int(3), 1);
    CHECK_THROWS_AS(test_invariant(d, deep, BoundConstants{}), Unsupported);

    SubvarietyDatum bad = d;
    bad.action[0].chi.components.push_back(CharacterComponent{1, true, {}, 1});
    CHECK_THROWS_AS(test_invariant(bad, maximal, BoundConstants{}), UnsupportedCharacter);
}
