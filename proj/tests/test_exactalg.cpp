#include "doctest.h"

#include <random>

#include "testinv/errors.hpp"
#include "testinv/exactalg.hpp"
#include "testinv/oracles.hpp"

using namespace testinv;
using namespace testinv::exactalg;

namespace {

IntMatrix make(std::size_t r, std::size_t c, std::initializer_list<long> vals)
{
    IntMatrix m(r, c);
    auto it = vals.begin();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.at(i, j) = Int(*it++);
    return m;
}

QLattice lattice(std::size_t n, std::initializer_list<const char*> cols)
{
    std::vector<QVec> columns;
    auto it = cols.begin();
    for (std::size_t j = 0; j < n; ++j) {
        QVec col;
        for (std::size_t i = 0; i < n; ++i)
            col.push_back(parse_rational(*it++));
        columns.push_back(col);
    }
    return QLattice(QMatrix::from_columns(columns));
}

bool spans_contain_each_other(const IntMatrix& a, const IntMatrix& b)
{
    for (std::size_t j = 0; j < b.cols(); ++j) {
        IVec col(b.rows());
        for (std::size_t i = 0; i < b.rows(); ++i)
            col[i] = b.at(i, j);
        if (!in_column_span(a, col))
            return false;
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
        IVec col(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i)
            col[i] = a.at(i, j);
        if (!in_column_span(b, col))
            return false;
    }
    return true;
}

} // namespace

TEST_CASE("hnf fixed points and span preservation")
{
    IntMatrix id = IntMatrix::identity(3);
    CHECK(hnf(id) == id);

    IntMatrix zero(2, 3);
    CHECK(hnf(zero) == zero);

    IntMatrix m = make(2, 2, {4, 2, 2, 2});
    IntMatrix h = hnf(m);
    CHECK(h == make(2, 2, {2, 0, 0, 2}));
    CHECK(spans_contain_each_other(m, h));
}

TEST_CASE("hnf span preservation on random matrices")
{
    std::mt19937_64 rng(12345);
    std::uniform_int_distribution<long> dist(-9, 9);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t r = 1 + rng() % 3, c = 1 + rng() % 4;
        IntMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m.at(i, j) = Int(dist(rng));
        IntMatrix h = hnf(m);
        CHECK(spans_contain_each_other(m, h));
        CHECK(hnf(h) == h); // canonical form is a fixed point
    }
}

TEST_CASE("snf examples and properties")
{
    SnfResult id = snf(IntMatrix::identity(2));
    CHECK(id.diag == std::vector<Int>{Int(1), Int(1)});

    SnfResult s = snf(make(2, 2, {2, 4, 6, 8}));
    CHECK(s.diag == std::vector<Int>{Int(2), Int(4)});

    SnfResult z = snf(IntMatrix(3, 2));
    CHECK(z.diag == std::vector<Int>{Int(0), Int(0)});

    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> dist(-12, 12);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t r = 1 + rng() % 3, c = 1 + rng() % 3;
        IntMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                m.at(i, j) = Int(dist(rng));
        SnfResult res = snf(m);
        CHECK(abs(det(res.u)) == 1);
        CHECK(abs(det(res.v)) == 1);
        IntMatrix prod = res.u.mul(m).mul(res.v);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                Int expect = (i == j && i < res.diag.size()) ? res.diag[i] : Int(0);
                CHECK(prod.at(i, j) == expect);
            }
        for (std::size_t i = 0; i + 1 < res.diag.size(); ++i) {
            CHECK(res.diag[i] >= 0);
            if (res.diag[i] != 0)
                CHECK(res.diag[i + 1] % res.diag[i] == 0);
            else
                CHECK(res.diag[i + 1] == 0);
        }
        if (r == c && det(m) != 0) {
            Int prod_d(1);
            for (const Int& d : res.diag)
                prod_d *= d;
            CHECK(prod_d == abs(det(m)));
        }
    }
}

TEST_CASE("lattice index")
{
    QLattice z2 = QLattice::standard(2);
    QLattice two_z2 = lattice(2, {"2", "0", "0", "2"});
    CHECK(lattice_index(z2, two_z2) == 4);
    CHECK(lattice_index(z2, z2) == 1);

    QLattice skew = lattice(2, {"2", "0", "1", "3"});
    CHECK(lattice_index(z2, skew) == 6);
    CHECK(oracles::coset_count_brute({{2, 0}, {1, 3}}) == 6);

    CHECK_THROWS_AS(lattice_index(two_z2, z2), NotSublattice);

    // multiplicativity on a nested triple
    QLattice mid = lattice(2, {"2", "0", "0", "1"});
    QLattice small = lattice(2, {"4", "2", "0", "6"});
    CHECK(lattice_index(z2, mid) * lattice_index(mid, small) == lattice_index(z2, small));
}

TEST_CASE("p-order in lattice")
{
    QLattice z2 = QLattice::standard(2);
    CHECK(p_order_in_lattice({Rat(1, 4), Rat(3)}, z2, Int(2)) == 2);
    CHECK(p_order_in_lattice({Rat(5), Rat(-7)}, z2, Int(3)) == 0);

    QLattice half = lattice(1, {"1/2"});
    CHECK(p_order_in_lattice({Rat(1, 4)}, half, Int(2)) == 1);
    CHECK(oracles::p_order_brute({Rat(1, 4)}, {{1}}, 2) == 2); // wrt Z, for contrast
    CHECK(oracles::p_order_brute({Rat(1, 4)}, {{2}}, 2) == 3); // wrt 2Z
    CHECK(oracles::p_order_brute({Rat(1, 2)}, {{1}}, 2) == 1);

    // translation invariance by lattice vectors
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<long> num(-20, 20);
    for (int trial = 0; trial < 50; ++trial) {
        QVec w{Rat(num(rng), 12), Rat(num(rng), 18)};
        for (Rat& q : w)
            q.canonicalize();
        QVec lam{Rat(num(rng)), Rat(num(rng))};
        for (long p : {2L, 3L}) {
            CHECK(p_order_in_lattice(w, z2, Int(p)) ==
                  p_order_in_lattice(add(w, lam), z2, Int(p)));
        }
    }
}

TEST_CASE("order in lattice")
{
    PrimeLattices std1 = PrimeLattices::standard(1);
    CHECK(order_in_lattice({Rat(1, 6)}, std1) == 6);
    CHECK(order_in_lattice({Rat(4)}, std1) == 1);

    PrimeLattices std2 = PrimeLattices::standard(2);
    CHECK(order_in_lattice({Rat(1, 4), Rat(1, 9)}, std2) == 36);

    // direct multiple search cross-check
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<long> num(-10, 10);
    std::uniform_int_distribution<long> den(1, 12);
    for (int trial = 0; trial < 30; ++trial) {
        QVec w{Rat(num(rng), den(rng)), Rat(num(rng), den(rng))};
        for (Rat& q : w)
            q.canonicalize();
        Int n = order_in_lattice(w, std2);
        for (Int k = 1; k <= n; ++k) {
            bool integral = true;
            for (const Rat& c : w) {
                Rat scaled = c * Rat(k);
                if (scaled.get_den() != 1)
                    integral = false;
            }
            CHECK(integral == (k == n));
            if (integral)
                break;
        }
    }

    // an exception lattice at p = 2 can absorb or create defects
    PrimeLattices with_exc = PrimeLattices::standard(1);
    with_exc.set_exception(Int(2), lattice(1, {"1/2"}));
    CHECK(order_in_lattice({Rat(1, 2)}, with_exc) == 1);
    PrimeLattices shrunk = PrimeLattices::standard(1);
    shrunk.set_exception(Int(2), lattice(1, {"2"}));
    CHECK(order_in_lattice({Rat(1)}, shrunk) == 2);
}

TEST_CASE("lattice sum, intersection and kernels")
{
    QLattice a = lattice(2, {"2", "0", "0", "1"});
    QLattice b = lattice(2, {"1", "0", "0", "3"});
    QLattice s = lattice_sum(a, b);
    CHECK(lattice_index(s, a) == 2);
    CHECK(lattice_index(s, b) == 3);
    QLattice i = lattice_intersection(a, b);
    CHECK(lattice_index(a, i) == 3);
    CHECK(lattice_index(b, i) == 2);
    // |sum : intersection| = |sum:a| * |a:intersection|
    CHECK(lattice_index(s, i) == 6);

    IntMatrix m = make(1, 3, {2, 4, 6});
    IntMatrix k = integer_kernel(m);
    CHECK(k.cols() == 2);
    for (std::size_t j = 0; j < k.cols(); ++j)
        CHECK(m.at(0, 0) * k.at(0, j) + m.at(0, 1) * k.at(1, j) + m.at(0, 2) * k.at(2, j) == 0);
}

TEST_CASE("subspace-lattice intersection and reduction")
{
    QLattice z2 = QLattice::standard(2);
    std::vector<QVec> diag_span{{Rat(1, 2), Rat(1, 2)}};
    auto cols = sublattice_of_subspace(diag_span, z2);
    REQUIRE(cols.size() == 1);
    // span((1/2,1/2)) ∩ Z^2 = Z(1,1)
    CHECK(abs(cols[0][0]) == 1);
    CHECK(cols[0][0] == cols[0][1]);

    QVec reduced = reduce_mod_lattice({Rat(7, 3), Rat(-5, 2)}, z2);
    CHECK(reduced == QVec{Rat(1, 3), Rat(1, 2)});
}
