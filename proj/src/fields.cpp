#include "testinv/fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "testinv/errors.hpp"
#include "testinv/exactalg.hpp"

namespace testinv::fields {

namespace {

constexpr unsigned long kMaxTotient = 20000;

unsigned long gcd_ul(unsigned long a, unsigned long b)
{
    while (b) {
        unsigned long t = a % b;
        a = b;
        b = t;
    }
    return a;
}

unsigned long mulmod_ul(unsigned long a, unsigned long b, unsigned long n)
{
    return static_cast<unsigned long>((static_cast<unsigned __int128>(a) * b) % n);
}

unsigned long powmod_ul(unsigned long base, unsigned long exp, unsigned long n)
{
    unsigned long out = 1 % n;
    base %= n;
    while (exp) {
        if (exp & 1)
            out = mulmod_ul(out, base, n);
        base = mulmod_ul(base, base, n);
        exp >>= 1;
    }
    return out;
}

unsigned long totient(unsigned long n)
{
    unsigned long result = n;
    unsigned long m = n;
    for (unsigned long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0)
                m /= p;
            result -= result / p;
        }
    }
    if (m > 1)
        result -= result / m;
    return result;
}

// (Z/n)^× decomposed into cyclic factors with a full discrete-log table.
struct UnitGroup {
    unsigned long n = 1;
    std::vector<unsigned long> gens;
    std::vector<unsigned long> orders;
    std::vector<unsigned long> elements; // units ascending
    std::unordered_map<unsigned long, std::vector<unsigned long>> dlog;
};

unsigned long primitive_root_mod_p(unsigned long p)
{
    if (p == 2)
        return 1;
    unsigned long phi = p - 1;
    std::vector<unsigned long> qs;
    unsigned long m = phi;
    for (unsigned long q = 2; q * q <= m; ++q)
        if (m % q == 0) {
            qs.push_back(q);
            while (m % q == 0)
                m /= q;
        }
    if (m > 1)
        qs.push_back(m);
    for (unsigned long g = 2; g < p; ++g) {
        bool ok = true;
        for (unsigned long q : qs)
            if (powmod_ul(g, phi / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok)
            return g;
    }
    throw Error("no primitive root found");
}

// Extended gcd based CRT lift: x ≡ r1 mod m1, x ≡ r2 mod m2, gcd(m1,m2)=1.
unsigned long crt_pair(unsigned long r1, unsigned long m1, unsigned long r2, unsigned long m2)
{
    Int x;
    Int M1(static_cast<unsigned long>(m1)), M2(static_cast<unsigned long>(m2));
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), M1.get_mpz_t(), M2.get_mpz_t()) == 0)
        throw Error("crt moduli not coprime");
    Int diff = (Int(r2) - Int(r1)) % M2;
    Int t = (diff * inv) % M2;
    if (t < 0)
        t += M2;
    x = Int(r1) + M1 * t;
    return to_ulong(Int(x % (M1 * M2)));
}

const UnitGroup& unit_group(unsigned long n)
{
    static std::map<unsigned long, UnitGroup> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    if (totient(n) > kMaxTotient)
        throw Unsupported("modulus too large for exact character enumeration: " + std::to_string(n));

    UnitGroup g;
    g.n = n;
    if (n > 1) {
        // Local generators per prime power, lifted through the CRT.
        unsigned long m = n;
        std::vector<std::pair<unsigned long, unsigned long>> pps; // (p, p^a)
        for (unsigned long p = 2; p * p <= m; ++p)
            if (m % p == 0) {
                unsigned long pa = 1;
                while (m % p == 0) {
                    m /= p;
                    pa *= p;
                }
                pps.emplace_back(p, pa);
            }
        if (m > 1)
            pps.emplace_back(m, m);
        for (auto [p, pa] : pps) {
            unsigned long rest = n / pa;
            auto lift = [&](unsigned long r) {
                return rest == 1 ? r % n : crt_pair(r, pa, 1, rest);
            };
            if (p == 2) {
                if (pa == 2) {
                    // trivial group
                } else if (pa == 4) {
                    g.gens.push_back(lift(3));
                    g.orders.push_back(2);
                } else if (pa >= 8) {
                    g.gens.push_back(lift(pa - 1));
                    g.orders.push_back(2);
                    g.gens.push_back(lift(5));
                    g.orders.push_back(pa / 4);
                }
            } else {
                unsigned long root = primitive_root_mod_p(p);
                if (pa > p && powmod_ul(root, p - 1, p * p) == 1)
                    root += p;
                g.gens.push_back(lift(root % pa));
                g.orders.push_back(totient(pa));
            }
        }
        for (unsigned long a = 1; a < n; ++a)
            if (gcd_ul(a, n) == 1)
                g.elements.push_back(a);
        // Full discrete-log table by walking all exponent tuples.
        std::vector<unsigned long> exps(g.gens.size(), 0);
        while (true) {
            unsigned long val = 1 % n;
            for (std::size_t i = 0; i < g.gens.size(); ++i)
                val = mulmod_ul(val, powmod_ul(g.gens[i], exps[i], n), n);
            g.dlog[val] = exps;
            std::size_t pos = 0;
            while (pos < exps.size()) {
                if (++exps[pos] < g.orders[pos])
                    break;
                exps[pos] = 0;
                ++pos;
            }
            if (pos == exps.size())
                break;
        }
        if (g.dlog.size() != g.elements.size())
            throw Error("unit group generator table incomplete");
    }
    return cache.emplace(n, std::move(g)).first->second;
}

// A character as exponents against the generator decomposition.
struct Character {
    std::vector<unsigned long> c;
};

bool char_is_one_at(const UnitGroup& g, const Character& chi, unsigned long a, unsigned long lcm_orders)
{
    const auto& e = g.dlog.at(a);
    unsigned long acc = 0;
    for (std::size_t i = 0; i < chi.c.size(); ++i) {
        unsigned long term = mulmod_ul(mulmod_ul(chi.c[i], e[i], lcm_orders ? lcm_orders : 1),
                                       lcm_orders / g.orders[i], lcm_orders ? lcm_orders : 1);
        acc = (acc + term) % (lcm_orders ? lcm_orders : 1);
    }
    return acc == 0;
}

std::vector<unsigned long> divisors_ascending(unsigned long n)
{
    std::vector<unsigned long> out;
    for (unsigned long f = 1; f * f <= n; ++f)
        if (n % f == 0) {
            out.push_back(f);
            if (f != n / f)
                out.push_back(n / f);
        }
    std::sort(out.begin(), out.end());
    return out;
}

unsigned long conductor(const UnitGroup& g, const Character& chi, unsigned long lcm_orders)
{
    for (unsigned long f : divisors_ascending(g.n)) {
        bool ok = true;
        for (unsigned long a : g.elements) {
            if (a % f != 1 % f)
                continue;
            if (!char_is_one_at(g, chi, a, lcm_orders)) {
                ok = false;
                break;
            }
        }
        if (ok)
            return f;
    }
    return g.n;
}

long isqrt_long(long n)
{
    long r = static_cast<long>(std::sqrt(static_cast<double>(n)));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

bool squarefree_long(long n)
{
    n = std::labs(n);
    for (long p = 2; p * p <= n; ++p)
        if (n % (p * p) == 0)
            return false;
    return true;
}

} // namespace

AbelianFieldSpec::AbelianFieldSpec(unsigned long modulus, std::vector<unsigned long> subgroup)
    : n_(modulus), h_(std::move(subgroup))
{
    if (n_ == 0)
        throw InvalidSubgroup("modulus must be positive");
    if (n_ == 1) {
        if (!h_.empty())
            throw InvalidSubgroup("modulus 1 takes an empty subgroup");
        return;
    }
    std::sort(h_.begin(), h_.end());
    h_.erase(std::unique(h_.begin(), h_.end()), h_.end());
    for (unsigned long a : h_) {
        if (a == 0 || a >= n_ || gcd_ul(a, n_) != 1)
            throw InvalidSubgroup("subgroup element " + std::to_string(a) + " is not a unit mod " + std::to_string(n_));
    }
    if (h_.empty() || h_.front() != 1)
        throw InvalidSubgroup("subgroup must contain 1");
    for (unsigned long a : h_)
        for (unsigned long b : h_)
            if (!std::binary_search(h_.begin(), h_.end(), mulmod_ul(a, b, n_)))
                throw InvalidSubgroup("subgroup is not closed under multiplication");
    if (totient(n_) % h_.size() != 0)
        throw InvalidSubgroup("subgroup order does not divide the unit group order");
}

AbelianFieldSpec AbelianFieldSpec::rationals()
{
    return AbelianFieldSpec(1, {});
}

AbelianFieldSpec AbelianFieldSpec::quadratic(long d)
{
    if (!is_fundamental_discriminant(d) || d == 1)
        throw NotFundamental("not a fundamental quadratic discriminant: " + std::to_string(d));
    unsigned long n = static_cast<unsigned long>(std::labs(d));
    Int dz(d);
    std::vector<unsigned long> h;
    for (unsigned long a = 1; a < n; ++a) {
        if (gcd_ul(a, n) != 1)
            continue;
        if (mpz_kronecker_ui(dz.get_mpz_t(), a) == 1)
            h.push_back(a);
    }
    return AbelianFieldSpec(n, std::move(h));
}

AbelianFieldSpec AbelianFieldSpec::cyclotomic(unsigned long n)
{
    if (n == 0)
        throw ValidationError("cyclotomic modulus must be positive");
    if (n % 4 == 2)
        n /= 2;
    if (n <= 2)
        return rationals();
    return AbelianFieldSpec(n, {1});
}

unsigned long AbelianFieldSpec::degree() const
{
    if (n_ == 1)
        return 1;
    return totient(n_) / h_.size();
}

bool AbelianFieldSpec::is_real() const
{
    if (n_ <= 2)
        return true;
    return std::binary_search(h_.begin(), h_.end(), n_ - 1);
}

std::optional<long> AbelianFieldSpec::quadratic_discriminant() const
{
    if (degree() != 2)
        return std::nullopt;
    Int a = abelian_field_discriminant(*this);
    long mag = to_long(a);
    return is_real() ? mag : -mag;
}

std::optional<unsigned long> AbelianFieldSpec::cyclotomic_modulus() const
{
    if (n_ >= 3 && h_.size() == 1)
        return n_;
    return std::nullopt;
}

std::string AbelianFieldSpec::cache_key() const
{
    std::ostringstream os;
    os << n_ << ':';
    for (std::size_t i = 0; i < h_.size(); ++i) {
        if (i)
            os << ',';
        os << h_[i];
    }
    return os.str();
}

AbelianFieldSpec AbelianFieldSpec::compositum(const AbelianFieldSpec& a, const AbelianFieldSpec& b)
{
    if (a.n_ == 1)
        return b;
    if (b.n_ == 1)
        return a;
    unsigned long n = a.n_ / gcd_ul(a.n_, b.n_) * b.n_;
    std::vector<unsigned long> h;
    for (unsigned long x = 1; x < n; ++x) {
        if (gcd_ul(x, n) != 1)
            continue;
        if (std::binary_search(a.h_.begin(), a.h_.end(), x % a.n_) &&
            std::binary_search(b.h_.begin(), b.h_.end(), x % b.n_))
            h.push_back(x);
    }
    return AbelianFieldSpec(n, std::move(h));
}

Int abelian_field_discriminant(const AbelianFieldSpec& f)
{
    if (f.modulus() == 1)
        return 1;
    const UnitGroup& g = unit_group(f.modulus());
    unsigned long lcm_orders = 1;
    for (unsigned long d : g.orders)
        lcm_orders = lcm_orders / gcd_ul(lcm_orders, d) * d;
    if (lcm_orders == 0)
        lcm_orders = 1;

    Int disc(1);
    unsigned long kept = 0;
    std::vector<unsigned long> exps(g.gens.size(), 0);
    while (true) {
        Character chi{exps};
        bool trivial_on_h = true;
        for (unsigned long h : f.subgroup())
            if (!char_is_one_at(g, chi, h, lcm_orders)) {
                trivial_on_h = false;
                break;
            }
        if (trivial_on_h) {
            ++kept;
            disc *= Int(conductor(g, chi, lcm_orders));
        }
        std::size_t pos = 0;
        while (pos < exps.size()) {
            if (++exps[pos] < g.orders[pos])
                break;
            exps[pos] = 0;
            ++pos;
        }
        if (pos == exps.size())
            break;
    }
    if (kept != f.degree())
        throw Error("character count does not match the field degree");
    return disc;
}

std::vector<Int> cyclotomic_polynomial(unsigned long n)
{
    static std::map<unsigned long, std::vector<Int>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);

    std::function<const std::vector<Int>&(unsigned long)> get = [&](unsigned long m) -> const std::vector<Int>& {
        auto it = cache.find(m);
        if (it != cache.end())
            return it->second;
        // x^m - 1 divided by the product of Phi_d over proper divisors d.
        std::vector<Int> num(m + 1, Int(0));
        num[0] = -1;
        num[m] = 1;
        for (unsigned long d = 1; d < m; ++d) {
            if (m % d != 0)
                continue;
            const std::vector<Int>& phi_d = get(d);
            std::size_t deg_num = num.size() - 1;
            std::size_t deg_d = phi_d.size() - 1;
            std::vector<Int> quot(deg_num - deg_d + 1, Int(0));
            std::vector<Int> rem = num;
            for (std::size_t k = deg_num - deg_d + 1; k-- > 0;) {
                Int coeff = rem[k + deg_d]; // leading divisor coeff is 1
                quot[k] = coeff;
                if (coeff == 0)
                    continue;
                for (std::size_t j = 0; j <= deg_d; ++j)
                    rem[k + j] -= coeff * phi_d[j];
            }
            for (std::size_t j = 0; j < deg_d; ++j)
                if (rem[j] != 0)
                    throw Error("cyclotomic polynomial division not exact");
            num = std::move(quot);
        }
        return cache.emplace(m, std::move(num)).first->second;
    };
    return get(n);
}

Int cyclotomic_poly_disc_oracle(unsigned long n)
{
    if (n < 3)
        throw ValidationError("cyclotomic discriminant oracle needs n >= 3");
    std::vector<Int> f = cyclotomic_polynomial(n);
    std::size_t m = f.size() - 1;
    std::vector<Int> fp(m, Int(0));
    for (std::size_t i = 1; i <= m; ++i)
        fp[i - 1] = f[i] * Int(static_cast<unsigned long>(i));
    // Resultant via the Sylvester matrix.
    std::size_t size = m + (m - 1);
    exactalg::IntMatrix syl(size, size);
    for (std::size_t row = 0; row < m - 1; ++row)
        for (std::size_t j = 0; j <= m; ++j)
            syl.at(row, row + j) = f[m - j];
    for (std::size_t row = 0; row < m; ++row)
        for (std::size_t j = 0; j <= m - 1; ++j)
            syl.at(m - 1 + row, row + j) = fp[m - 1 - j];
    return abs(exactalg::det(syl));
}

bool is_fundamental_discriminant(long d)
{
    if (d == 0 || d == 1)
        return d == 1;
    long r = ((d % 4) + 4) % 4;
    if (r == 1)
        return squarefree_long(d);
    if (r == 0) {
        long q = d / 4;
        long qr = ((q % 4) + 4) % 4;
        return (qr == 2 || qr == 3) && squarefree_long(q);
    }
    return false;
}

Int quadratic_class_number(const Int& d)
{
    if (d >= 0)
        throw NotFundamental("discriminant must be negative");
    long dl = to_long(d);
    if (!is_fundamental_discriminant(dl))
        throw NotFundamental("not a fundamental discriminant: " + d.get_str());
    long mag = -dl;
    long count = 0;
    for (long a = 1; 3 * a * a <= mag; ++a) {
        for (long b = -a; b <= a; ++b) {
            if (((b - dl) % 2 + 2) % 2 != 0)
                continue;
            long num = b * b + mag;
            if (num % (4 * a) != 0)
                continue;
            long c = num / (4 * a);
            if (c < a)
                continue;
            if ((std::labs(b) == a || a == c) && b < 0)
                continue;
            long g = std::gcd(std::gcd(a, std::labs(b)), c);
            if (g != 1)
                continue;
            ++count;
        }
    }
    return Int(count);
}

namespace {

using Form = std::tuple<long, long, long>;

bool indefinite_reduced(const Form& fm, long d)
{
    auto [a, b, c] = fm;
    if (b <= 0 || b * b >= d)
        return false;
    long aa = 2 * std::labs(a);
    if ((b + aa) * (b + aa) <= d)
        return false;
    if (aa > b && (aa - b) * (aa - b) >= d)
        return false;
    return true;
}

Form rho_step(const Form& fm, long d, long s)
{
    auto [a, b, c] = fm;
    long ac = std::labs(c);
    long r;
    if (static_cast<long long>(c) * c > d) {
        long t = ((-b) % (2 * ac) + 2 * ac) % (2 * ac);
        r = t > ac ? t - 2 * ac : t;
    } else {
        r = s - (((s + b) % (2 * ac)) + 2 * ac) % (2 * ac);
    }
    long c2 = (r * r - d) / (4 * c);
    return Form{c, r, c2};
}

} // namespace

Int real_quadratic_class_number(long d)
{
    if (d <= 0 || !is_fundamental_discriminant(d))
        throw NotFundamental("not a positive fundamental discriminant: " + std::to_string(d));
    if (d > 200)
        throw Unsupported("real quadratic class numbers are computed only for d <= 200");
    long s = isqrt_long(d);

    std::set<Form> reduced;
    for (long b = 1; b <= s; ++b) {
        if (((b - d) % 2 + 2) % 2 != 0)
            continue;
        long n4 = d - b * b;
        if (n4 % 4 != 0)
            throw Error("parity violation in form enumeration");
        long n = n4 / 4; // = |a c|
        for (long aa = 1; aa <= n; ++aa) {
            if (n % aa != 0)
                continue;
            if ((b + 2 * aa) * (b + 2 * aa) <= d)
                continue;
            if (2 * aa > b && (2 * aa - b) * (2 * aa - b) >= d)
                continue;
            for (long a : {aa, -aa}) {
                long c = (b * b - d) / (4 * a);
                if (std::gcd(std::gcd(std::labs(a), b), std::labs(c)) != 1)
                    continue;
                reduced.insert(Form{a, b, c});
            }
        }
    }

    auto reduce_form = [&](Form fm) {
        for (int guard = 0; guard < 100000; ++guard) {
            if (indefinite_reduced(fm, d))
                return fm;
            fm = rho_step(fm, d, s);
        }
        throw Error("form reduction did not terminate");
    };
    auto cycle_of = [&](const Form& start) {
        std::vector<Form> cyc{start};
        Form cur = rho_step(start, d, s);
        while (cur != start) {
            cyc.push_back(cur);
            cur = rho_step(cur, d, s);
        }
        return cyc;
    };

    long cycles = 0;
    std::set<Form> seen;
    for (const Form& fm : reduced) {
        if (seen.count(fm))
            continue;
        ++cycles;
        for (const Form& g : cycle_of(fm)) {
            if (!reduced.count(g))
                throw Error("rho left the reduced form set");
            seen.insert(g);
        }
    }

    // Narrow vs wide: equal iff the (-1)-form is principal, i.e. a norm -1
    // unit exists.
    long sigma = ((d % 2) + 2) % 2;
    Form principal{1, sigma, (sigma * sigma - d) / 4};
    Form minus_one{-1, sigma, (d - sigma * sigma) / 4};
    Form p_red = reduce_form(principal);
    Form m_red = reduce_form(minus_one);
    bool same_cycle = false;
    for (const Form& g : cycle_of(p_red))
        if (g == m_red) {
            same_cycle = true;
            break;
        }
    if (same_cycle)
        return Int(cycles);
    if (cycles % 2 != 0)
        throw Error("narrow class number parity violation");
    return Int(cycles / 2);
}

PellSolution pell_fundamental(const Int& d)
{
    if (d <= 1 || mpz_perfect_square_p(d.get_mpz_t()))
        throw SquareInput("pell_fundamental needs a nonsquare d > 1");
    Int a0;
    mpz_sqrt(a0.get_mpz_t(), d.get_mpz_t());
    Int P(0), Q(1);
    Int p_prev(1), p_cur(a0), q_prev(0), q_cur(1);
    unsigned long period = 0;
    for (unsigned long i = 1;; ++i) {
        Int a = (a0 + P) / Q; // floor since all terms positive
        if (i > 1) {
            Int p_next = a * p_cur + p_prev;
            Int q_next = a * q_cur + q_prev;
            p_prev = p_cur;
            p_cur = p_next;
            q_prev = q_cur;
            q_cur = q_next;
        }
        Int P_next = a * Q - P;
        Int Q_next = (d - P_next * P_next) / Q;
        P = P_next;
        Q = Q_next;
        if (Q == 1) {
            period = i;
            break;
        }
        if (i > 100000)
            throw Error("pell continued fraction did not close");
    }
    Int x = p_cur, y = q_cur;
    if (period % 2 == 1) {
        Int x2 = x * x + d * y * y;
        Int y2 = 2 * x * y;
        x = x2;
        y = y2;
    }
    if (x * x - d * y * y != 1)
        throw Error("pell solution check failed");
    return PellSolution{x, y};
}

LocalSplitting local_splitting(const AbelianFieldSpec& field, const Int& p)
{
    LocalSplitting out;
    out.p = p;
    unsigned long deg = field.degree();
    if (deg == 1)
        return out;
    unsigned long n = field.modulus();
    unsigned long pl = to_ulong(p);
    unsigned long n_prime = n;
    unsigned long p_part = 1;
    while (n_prime % pl == 0) {
        n_prime /= pl;
        p_part *= pl;
    }

    const UnitGroup& g = unit_group(n);
    const auto& h = field.subgroup();
    auto coset_key = [&](unsigned long a) {
        unsigned long best = n;
        for (unsigned long x : h)
            best = std::min(best, mulmod_ul(a, x, n));
        return best;
    };

    // Inertia: image of the units congruent to 1 mod the prime-to-p part.
    std::set<unsigned long> inertia_cosets;
    std::vector<unsigned long> inertia_elements;
    for (unsigned long a : g.elements)
        if (a % n_prime == 1 % n_prime) {
            inertia_cosets.insert(coset_key(a));
            inertia_elements.push_back(a);
        }
    out.e = inertia_cosets.size();

    // Frobenius: any unit congruent to p mod the prime-to-p part.
    unsigned long frob;
    if (p_part == 1) {
        frob = pl % n;
    } else {
        frob = crt_pair(pl % n_prime, n_prime, 1, p_part);
    }
    // Membership in inertia * H decides when frob^f acts trivially on the
    // residue extension.
    std::set<unsigned long> ih;
    for (unsigned long t : inertia_elements)
        for (unsigned long x : h)
            ih.insert(mulmod_ul(t, x, n));
    unsigned long f = 1;
    unsigned long acc = frob;
    while (!ih.count(acc)) {
        acc = mulmod_ul(acc, frob, n);
        ++f;
        if (f > deg)
            throw Error("frobenius order exceeded the field degree");
    }
    out.f = f;
    if (deg % (out.e * out.f) != 0)
        throw Error("e*f does not divide the degree");
    out.g = deg / (out.e * out.f);
    return out;
}

void FieldCache::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        return; // a missing cache file is an empty cache
    std::unique_lock lock(mu_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string kind, key, value;
        if (!(ls >> kind >> key >> value))
            throw ParseError("cache line " + std::to_string(lineno) + ": expected 'kind key value'");
        std::string extra;
        if (ls >> extra)
            throw ParseError("cache line " + std::to_string(lineno) + ": trailing tokens");
        Int v = parse_integer(value);
        if (kind == "h")
            h_[key] = v;
        else if (kind == "disc")
            disc_[key] = v;
        else
            throw ParseError("cache line " + std::to_string(lineno) + ": unknown kind '" + kind + "'");
    }
}

void FieldCache::save(const std::string& path) const
{
    std::shared_lock lock(mu_);
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw Error("cannot write cache file: " + path);
    for (const auto& [k, v] : disc_)
        out << "disc " << k << ' ' << v.get_str() << '\n';
    for (const auto& [k, v] : h_)
        out << "h " << k << ' ' << v.get_str() << '\n';
}

std::optional<Int> FieldCache::get_class_number(const Int& d) const
{
    std::shared_lock lock(mu_);
    auto it = h_.find(d.get_str());
    if (it == h_.end())
        return std::nullopt;
    return it->second;
}

void FieldCache::put_class_number(const Int& d, const Int& h)
{
    std::unique_lock lock(mu_);
    h_[d.get_str()] = h;
}

std::optional<Int> FieldCache::get_discriminant(const std::string& field_key) const
{
    std::shared_lock lock(mu_);
    auto it = disc_.find(field_key);
    if (it == disc_.end())
        return std::nullopt;
    return it->second;
}

void FieldCache::put_discriminant(const std::string& field_key, const Int& disc)
{
    std::unique_lock lock(mu_);
    disc_[field_key] = disc;
}

} // namespace testinv::fields
