#include "testinv/oracles.hpp"

#include <cstdlib>
#include <numeric>
#include <vector>

#include "testinv/errors.hpp"

namespace testinv::oracles {

long reduced_form_count_brute(long d)
{
    if (d >= 0)
        throw ValidationError("expects d < 0");
    long mag = -d;
    long count = 0;
    for (long a = 1; 3 * a * a <= mag; ++a) {
        long cmax = (a * a + mag) / (4 * a);
        for (long c = a; c <= cmax; ++c)
            for (long b = -a; b <= a; ++b) {
                if (b * b - 4 * a * c != d)
                    continue;
                if ((std::labs(b) == a || a == c) && b < 0)
                    continue;
                if (std::gcd(std::gcd(a, std::labs(b)), c) != 1)
                    continue;
                ++count;
            }
    }
    return count;
}

std::pair<Int, Int> pell_brute(long d, long y_limit)
{
    Int dz(d);
    for (long y = 1; y <= y_limit; ++y) {
        Int yy(y);
        Int xx = 1 + dz * yy * yy;
        if (mpz_perfect_square_p(xx.get_mpz_t())) {
            Int x;
            mpz_sqrt(x.get_mpz_t(), xx.get_mpz_t());
            return {x, yy};
        }
    }
    throw Error("pell brute force exhausted its search bound");
}

namespace {

// Minimal standalone polynomial-quotient arithmetic on small moduli, kept
// separate from the library's residue rings on purpose.
struct TinyRing {
    long mod;
    std::vector<long> f; // monic min poly coefficients below the top
    std::size_t deg;

    std::vector<long> mul(const std::vector<long>& a, const std::vector<long>& b) const
    {
        std::vector<long> conv(2 * deg - 1, 0);
        for (std::size_t i = 0; i < deg; ++i)
            for (std::size_t j = 0; j < deg; ++j)
                conv[i + j] = (conv[i + j] + a[i] * b[j]) % mod;
        for (std::size_t i = conv.size(); i-- > deg;) {
            long c = conv[i] % mod;
            conv[i] = 0;
            for (std::size_t j = 0; j < deg; ++j)
                conv[i - deg + j] = ((conv[i - deg + j] - c * f[j]) % mod + mod) % mod;
        }
        conv.resize(deg);
        return conv;
    }
};

} // namespace

Int unit_count_exhaustive(const Int& p, unsigned k, const std::vector<Int>& monic_min_poly)
{
    Int qz = ipow(p, k);
    long q = to_long(qz);
    std::size_t deg = monic_min_poly.size() - 1;
    double total = 1;
    for (std::size_t i = 0; i < deg; ++i)
        total *= static_cast<double>(q);
    if (total > 4096)
        throw ValidationError("ring too large for the exhaustive unit count");

    TinyRing ring{q, {}, deg};
    for (std::size_t i = 0; i < deg; ++i) {
        long c = to_long(Int(monic_min_poly[i] % qz));
        ring.f.push_back(((c % q) + q) % q);
    }

    std::vector<std::vector<long>> elements;
    std::vector<long> cur(deg, 0);
    while (true) {
        elements.push_back(cur);
        std::size_t pos = 0;
        while (pos < deg) {
            if (++cur[pos] < q)
                break;
            cur[pos] = 0;
            ++pos;
        }
        if (pos == deg)
            break;
    }

    std::vector<long> one(deg, 0);
    one[0] = 1 % q;
    long units = 0;
    for (const auto& a : elements) {
        for (const auto& b : elements)
            if (ring.mul(a, b) == one) {
                ++units;
                break;
            }
    }
    return Int(units);
}

Int norm_value_index_exhaustive(long d, long p, unsigned k)
{
    std::uint64_t q = 1;
    for (unsigned i = 0; i < k; ++i)
        q *= static_cast<std::uint64_t>(p);
    // Norm form of the maximal order: N(a + b*omega) = a^2 + a*b*T + b^2*N.
    long long tr, nm;
    if (((d % 4) + 4) % 4 == 1) {
        tr = 1;
        nm = (1 - static_cast<long long>(d)) / 4;
    } else {
        tr = 0;
        nm = -static_cast<long long>(d) / 4;
    }
    auto modq = [&](long long v) {
        long long m = v % static_cast<long long>(q);
        return static_cast<std::uint64_t>(m < 0 ? m + static_cast<long long>(q) : m);
    };

    std::uint64_t unit_total = q / static_cast<std::uint64_t>(p) * (static_cast<std::uint64_t>(p) - 1);
    std::vector<std::uint8_t> seen(q, 0);
    std::uint64_t found = 0;
    std::uint64_t t_mod = modq(tr), n_mod = modq(nm);
    for (std::uint64_t b = 0; b < q && found < unit_total; ++b) {
        std::uint64_t bt = (b * t_mod) % q;
        std::uint64_t b2n = (((b * b) % q) * n_mod) % q;
        // value(a) = a^2 + a*bt + b2n stepped incrementally over a
        std::uint64_t val = b2n;
        std::uint64_t step = (1 + bt) % q; // value(1) - value(0)
        for (std::uint64_t a = 0; a < q; ++a) {
            if (val % static_cast<std::uint64_t>(p) != 0 && !seen[val]) {
                seen[val] = 1;
                ++found;
                if (found == unit_total)
                    break;
            }
            val += step;
            if (val >= q)
                val -= q;
            step += 2;
            if (step >= q)
                step -= q;
        }
    }
    if (found == 0)
        throw Error("empty norm value set");
    if (unit_total % found != 0)
        throw Error("norm value set size does not divide the unit count");
    return Int(static_cast<unsigned long>(unit_total / found));
}

namespace {

bool in_span_brute(const std::vector<long>& v, const std::vector<std::vector<long>>& cols, long bound)
{
    // two-dimensional exhaustive coefficient search
    for (long c1 = -bound; c1 <= bound; ++c1)
        for (long c2 = -bound; c2 <= bound; ++c2)
            if (c1 * cols[0][0] + c2 * cols[1][0] == v[0] &&
                c1 * cols[0][1] + c2 * cols[1][1] == v[1])
                return true;
    return false;
}

} // namespace

Int coset_count_brute(const std::vector<std::vector<long>>& basis_columns)
{
    if (basis_columns.size() != 2 || basis_columns[0].size() != 2)
        throw ValidationError("coset oracle handles dimension 2 only");
    long det = basis_columns[0][0] * basis_columns[1][1] - basis_columns[1][0] * basis_columns[0][1];
    long r = std::labs(det);
    if (r == 0)
        throw ValidationError("degenerate basis");
    long bound = 4 * r;
    std::vector<std::vector<long>> reps;
    for (long x = 0; x < r; ++x)
        for (long y = 0; y < r; ++y) {
            std::vector<long> v{x, y};
            bool fresh = true;
            for (const auto& rep : reps) {
                std::vector<long> diff{v[0] - rep[0], v[1] - rep[1]};
                if (in_span_brute(diff, basis_columns, bound)) {
                    fresh = false;
                    break;
                }
            }
            if (fresh)
                reps.push_back(v);
        }
    // |det| * Z^2 lies in the lattice, so [0,r)^2 meets every coset.
    return Int(static_cast<long>(reps.size()));
}

long p_order_brute(const std::vector<Rat>& w, const std::vector<std::vector<long>>& basis_columns,
                   long p, long m_limit)
{
    std::size_t n = w.size();
    if (basis_columns.size() != n)
        throw ValidationError("basis must be square");
    // Exact Gaussian solve for coordinates, independent of the library path.
    auto coords_of = [&](const std::vector<Rat>& v) {
        std::vector<std::vector<Rat>> aug(n, std::vector<Rat>(n + 1, Rat(0)));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                aug[i][j] = Rat(basis_columns[j][i]);
            aug[i][n] = v[i];
        }
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && aug[pivot][col] == 0)
                ++pivot;
            if (pivot == n)
                throw ValidationError("degenerate basis");
            std::swap(aug[col], aug[pivot]);
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col || aug[i][col] == 0)
                    continue;
                Rat f = aug[i][col] / aug[col][col];
                for (std::size_t j = col; j <= n; ++j)
                    aug[i][j] -= f * aug[col][j];
            }
        }
        std::vector<Rat> out(n);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = aug[i][n] / aug[i][i];
        return out;
    };

    Int pz(p);
    for (long m = 0; m <= m_limit; ++m) {
        Rat f(ipow(pz, static_cast<unsigned long>(m)));
        std::vector<Rat> scaled(n);
        for (std::size_t i = 0; i < n; ++i)
            scaled[i] = f * w[i];
        bool ok = true;
        for (const Rat& c : coords_of(scaled)) {
            if (c == 0)
                continue;
            if (Int(c.get_den()) % pz == 0) {
                ok = false;
                break;
            }
        }
        if (ok)
            return m;
    }
    throw Error("p-order brute force exhausted its bound");
}

} // namespace testinv::oracles
