#include "testinv/localtori.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_set>

#include "testinv/errors.hpp"
#include "testinv/exactalg.hpp"

namespace testinv::localtori {

namespace {

constexpr std::uint64_t kModulusCap = (1ull << 62);
constexpr std::size_t kClosureCap = 1u << 22;

std::uint64_t to_u64_checked(const Int& n)
{
    if (n < 0 || !n.fits_ulong_p())
        throw Unsupported("modulus exceeds the 64-bit residue arithmetic range: " + n.get_str());
    return n.get_ui();
}

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const
    {
        std::uint64_t h = 1469598103934665603ull;
        for (std::uint64_t x : v) {
            h ^= x;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

} // namespace

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m)
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

std::uint64_t powmod64(std::uint64_t base, const Int& exp, std::uint64_t m)
{
    if (exp < 0)
        throw Error("powmod64 expects a nonnegative exponent");
    std::uint64_t out = 1 % m;
    base %= m;
    Int e = exp;
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t()))
            out = mulmod64(out, base, m);
        base = mulmod64(base, base, m);
        e >>= 1;
    }
    return out;
}

std::uint64_t invmod64(std::uint64_t a, std::uint64_t m)
{
    Int inv;
    Int az(static_cast<unsigned long>(a)), mz(static_cast<unsigned long>(m));
    if (mpz_invert(inv.get_mpz_t(), az.get_mpz_t(), mz.get_mpz_t()) == 0)
        throw Error("non-invertible residue");
    return to_u64_checked(inv);
}

LocalFieldFactor LocalFieldFactor::rational()
{
    return LocalFieldFactor{};
}

LocalFieldFactor LocalFieldFactor::from_field(const fields::AbelianFieldSpec& f)
{
    LocalFieldFactor out;
    if (f.degree() == 1) {
        out.kind = Kind::rational;
        return out;
    }
    if (auto d = f.quadratic_discriminant()) {
        out.kind = Kind::quadratic;
        out.quad_disc = *d;
        return out;
    }
    if (auto n = f.cyclotomic_modulus()) {
        out.kind = Kind::cyclotomic;
        out.cyclo_n = *n;
        return out;
    }
    throw UnsupportedField("local unit groups support only rational, quadratic and cyclotomic blocks");
}

std::vector<Int> LocalFieldFactor::min_poly() const
{
    switch (kind) {
    case Kind::rational:
        return {Int(0), Int(1)};
    case Kind::quadratic: {
        long d = quad_disc;
        if (((d % 4) + 4) % 4 == 1) {
            // x^2 - x + (1-d)/4, the minimal polynomial of (1+sqrt(d))/2
            return {Int((1 - d) / 4), Int(-1), Int(1)};
        }
        return {Int(-d / 4), Int(0), Int(1)};
    }
    case Kind::cyclotomic:
        return fields::cyclotomic_polynomial(cyclo_n);
    }
    throw Error("unreachable factor kind");
}

unsigned long LocalFieldFactor::ring_degree() const
{
    return static_cast<unsigned long>(min_poly().size() - 1);
}

fields::AbelianFieldSpec LocalFieldFactor::field_spec() const
{
    switch (kind) {
    case Kind::rational:
        return fields::AbelianFieldSpec::rationals();
    case Kind::quadratic:
        return fields::AbelianFieldSpec::quadratic(quad_disc);
    case Kind::cyclotomic:
        return fields::AbelianFieldSpec::cyclotomic(cyclo_n);
    }
    throw Error("unreachable factor kind");
}

ResidueRing::ResidueRing(const Int& p, unsigned k, const std::vector<Int>& monic_min_poly)
    : p_(p), k_(k)
{
    if (k == 0)
        throw ValidationError("residue precision must be >= 1");
    Int mod = ipow(p, k);
    if (mod >= Int(static_cast<unsigned long>(kModulusCap >> 1)))
        throw Unsupported("p^k too large for residue arithmetic: " + mod.get_str());
    mod_ = to_u64_checked(mod);
    if (monic_min_poly.size() < 2 || monic_min_poly.back() != 1)
        throw ValidationError("minimal polynomial must be monic of degree >= 1");
    deg_ = monic_min_poly.size() - 1;
    f_.resize(deg_);
    for (std::size_t i = 0; i < deg_; ++i) {
        Int c = monic_min_poly[i] % mod;
        if (c < 0)
            c += mod;
        f_[i] = to_u64_checked(c);
    }
}

ResidueRing::Elt ResidueRing::one() const
{
    Elt e(deg_, 0);
    e[0] = 1 % mod_;
    return e;
}

ResidueRing::Elt ResidueRing::from_coeffs(const std::vector<Int>& coeffs) const
{
    if (coeffs.size() > deg_)
        throw DimensionMismatch("too many coefficients for the residue ring");
    Elt e(deg_, 0);
    Int mod(static_cast<unsigned long>(mod_));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        Int c = coeffs[i] % mod;
        if (c < 0)
            c += mod;
        e[i] = to_u64_checked(c);
    }
    return e;
}

ResidueRing::Elt ResidueRing::mul(const Elt& a, const Elt& b) const
{
    std::vector<std::uint64_t> conv(2 * deg_ - 1, 0);
    for (std::size_t i = 0; i < deg_; ++i) {
        if (a[i] == 0)
            continue;
        for (std::size_t j = 0; j < deg_; ++j) {
            if (b[j] == 0)
                continue;
            conv[i + j] = (conv[i + j] + mulmod64(a[i], b[j], mod_)) % mod_;
        }
    }
    // Reduce by the monic minimal polynomial from the top coefficient down.
    for (std::size_t i = conv.size(); i-- > deg_;) {
        std::uint64_t c = conv[i];
        if (c == 0)
            continue;
        conv[i] = 0;
        for (std::size_t j = 0; j < deg_; ++j) {
            std::uint64_t sub = mulmod64(c, f_[j], mod_);
            conv[i - deg_ + j] = (conv[i - deg_ + j] + mod_ - sub) % mod_;
        }
    }
    conv.resize(deg_);
    return conv;
}

ResidueRing::Elt ResidueRing::pow(Elt base, Int exp) const
{
    if (exp < 0)
        throw Error("ring power expects a nonnegative exponent");
    Elt out = one();
    while (exp > 0) {
        if (mpz_odd_p(exp.get_mpz_t()))
            out = mul(out, base);
        base = mul(base, base);
        exp >>= 1;
    }
    return out;
}

bool ResidueRing::is_unit(const Elt& a) const
{
    std::uint64_t n = norm(a);
    Int g = gcd(Int(static_cast<unsigned long>(n)), p_);
    return g == 1;
}

std::uint64_t ResidueRing::norm(const Elt& a) const
{
    if (deg_ == 1)
        return a[0];
    exactalg::IntMatrix m(deg_, deg_);
    Elt col = a;
    for (std::size_t j = 0; j < deg_; ++j) {
        for (std::size_t i = 0; i < deg_; ++i)
            m.at(i, j) = Int(static_cast<unsigned long>(col[i]));
        if (j + 1 < deg_) {
            // multiply by x
            Elt shifted(deg_, 0);
            std::uint64_t top = col[deg_ - 1];
            for (std::size_t i = deg_ - 1; i > 0; --i)
                shifted[i] = col[i - 1];
            shifted[0] = 0;
            if (top != 0)
                for (std::size_t i = 0; i < deg_; ++i) {
                    std::uint64_t sub = mulmod64(top, f_[i], mod_);
                    shifted[i] = (shifted[i] + mod_ - sub) % mod_;
                }
            col = shifted;
        }
    }
    Int d = exactalg::det(m);
    Int mod(static_cast<unsigned long>(mod_));
    d %= mod;
    if (d < 0)
        d += mod;
    return to_u64_checked(d);
}

std::vector<ResidueRing::Elt> ResidueRing::all_elements() const
{
    double total = 1;
    for (std::size_t i = 0; i < deg_; ++i)
        total *= static_cast<double>(mod_);
    if (total > static_cast<double>(kClosureCap))
        throw Unsupported("residue ring too large to enumerate");
    std::vector<Elt> out;
    Elt cur(deg_, 0);
    while (true) {
        out.push_back(cur);
        std::size_t pos = 0;
        while (pos < deg_) {
            if (++cur[pos] < mod_)
                break;
            cur[pos] = 0;
            ++pos;
        }
        if (pos == deg_)
            break;
    }
    return out;
}

ResidueRing::Elt ResidueRing::reduce_coeffs(const Elt& a, std::uint64_t to_modulus) const
{
    Elt out = a;
    for (auto& c : out)
        c %= to_modulus;
    return out;
}

namespace {

// Greedy generating set of the units of O/pO found by closure enumeration.
std::vector<ResidueRing::Elt> residue_unit_generators(const ResidueRing& r1)
{
    std::vector<ResidueRing::Elt> units;
    for (const auto& e : r1.all_elements())
        if (r1.is_unit(e))
            units.push_back(e);

    auto closure = [&](const std::vector<ResidueRing::Elt>& gens) {
        std::set<ResidueRing::Elt> seen;
        std::deque<ResidueRing::Elt> work;
        seen.insert(r1.one());
        work.push_back(r1.one());
        while (!work.empty()) {
            ResidueRing::Elt cur = work.front();
            work.pop_front();
            for (const auto& g : gens) {
                ResidueRing::Elt nxt = r1.mul(cur, g);
                if (seen.insert(nxt).second)
                    work.push_back(nxt);
            }
        }
        return seen;
    };

    std::vector<ResidueRing::Elt> gens;
    std::set<ResidueRing::Elt> have{r1.one()};
    for (const auto& u : units) {
        if (have.count(u))
            continue;
        gens.push_back(u);
        have = closure(gens);
    }
    if (have.size() != units.size())
        throw Error("residue unit closure incomplete");
    return gens;
}

std::string factor_cache_key(const LocalFieldFactor& f, const Int& p, unsigned k)
{
    std::ostringstream os;
    os << static_cast<int>(f.kind) << '/' << f.quad_disc << '/' << f.cyclo_n << '/' << p.get_str() << '/' << k;
    return os.str();
}

} // namespace

LocalUnitGroup unit_group_generators(const LocalFieldFactor& factor, const Int& p, unsigned k)
{
    static std::map<std::string, LocalUnitGroup> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(factor_cache_key(factor, p, k));
        if (it != cache.end())
            return it->second;
    }
    if (!is_prime(p))
        throw ValidationError("p must be prime: " + p.get_str());
    if (k < 1)
        throw ValidationError("precision k must be >= 1");

    ResidueRing ring(p, k, factor.min_poly());
    LocalUnitGroup out{p, k, {}, ring, {}, Int(1)};

    if (factor.kind == LocalFieldFactor::Kind::rational) {
        out.blocks = {{1, 1}};
        std::uint64_t mod = ring.modulus();
        std::uint64_t pl = to_u64_checked(p);
        if (p == 2) {
            if (k == 2)
                out.gens = {ResidueRing::Elt{3}};
            else if (k >= 3)
                out.gens = {ResidueRing::Elt{mod - 1}, ResidueRing::Elt{5 % mod}};
        } else {
            // Lift of a primitive root mod p plus the 1-unit 1+p.
            std::uint64_t root = 2;
            {
                unsigned long phi = static_cast<unsigned long>(pl - 1);
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
                for (std::uint64_t g = 2; g < pl; ++g) {
                    bool ok = true;
                    for (unsigned long q : qs)
                        if (powmod64(g, Int(phi / q), pl) == 1) {
                            ok = false;
                            break;
                        }
                    if (ok) {
                        root = g;
                        break;
                    }
                }
            }
            out.gens = {ResidueRing::Elt{root % mod}};
            if (k >= 2)
                out.gens.push_back(ResidueRing::Elt{(pl + 1) % mod});
        }
        out.order = ipow(p, k) - ipow(p, k - 1);
    } else {
        fields::LocalSplitting split = fields::local_splitting(factor.field_spec(), p);
        for (unsigned long i = 0; i < split.g; ++i)
            out.blocks.emplace_back(split.e, split.f);

        // Residue-level generators lifted coefficient-wise, then the 1-unit
        // filtration 1 + p^j x^t which fills U_1/U_k.
        ResidueRing r1(p, 1, factor.min_poly());
        for (const auto& g : residue_unit_generators(r1)) {
            std::vector<Int> coeffs;
            for (std::uint64_t c : g)
                coeffs.emplace_back(static_cast<unsigned long>(c));
            out.gens.push_back(ring.from_coeffs(coeffs));
        }
        for (unsigned j = 1; j < k; ++j)
            for (unsigned long t = 0; t < factor.ring_degree(); ++t) {
                std::vector<Int> coeffs(t + 1, Int(0));
                coeffs[0] = 1;
                coeffs[t] += ipow(p, j);
                out.gens.push_back(ring.from_coeffs(coeffs));
            }

        Int order(1);
        for (auto [e, f] : out.blocks) {
            Int q = ipow(p, f);
            order *= (q - 1) * ipow(p, f * (e * k - 1));
        }
        out.order = order;
    }

    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(factor_cache_key(factor, p, k), out);
    return out;
}

Int generator_closure_order(const LocalUnitGroup& group)
{
    std::set<ResidueRing::Elt> seen{group.ring.one()};
    std::deque<ResidueRing::Elt> work{group.ring.one()};
    while (!work.empty()) {
        ResidueRing::Elt cur = work.front();
        work.pop_front();
        for (const auto& g : group.gens) {
            ResidueRing::Elt nxt = group.ring.mul(cur, g);
            if (seen.insert(nxt).second) {
                if (seen.size() > kClosureCap)
                    throw Unsupported("unit group closure exceeded the enumeration cap");
                work.push_back(nxt);
            }
        }
    }
    return Int(static_cast<unsigned long>(seen.size()));
}

Int closure_size_mod(const std::vector<std::uint64_t>& gens, std::uint64_t modulus)
{
    std::unordered_set<std::uint64_t> seen;
    std::deque<std::uint64_t> work;
    seen.insert(1 % modulus);
    work.push_back(1 % modulus);
    while (!work.empty()) {
        std::uint64_t cur = work.front();
        work.pop_front();
        for (std::uint64_t g : gens) {
            std::uint64_t nxt = mulmod64(cur, g % modulus, modulus);
            if (seen.insert(nxt).second) {
                if (seen.size() > kClosureCap)
                    throw Unsupported("unit subgroup closure exceeded the enumeration cap");
                work.push_back(nxt);
            }
        }
    }
    return Int(static_cast<unsigned long>(seen.size()));
}

namespace {

Int norm_image_index_at(const LocalFieldFactor& factor, const Int& p, unsigned k)
{
    LocalUnitGroup ug = unit_group_generators(factor, p, k);
    std::vector<std::uint64_t> norm_gens;
    for (const auto& g : ug.gens)
        norm_gens.push_back(ug.ring.norm(g));
    Int phi = ipow(p, k) - ipow(p, k - 1);
    Int sub = closure_size_mod(norm_gens, ug.ring.modulus());
    if (phi % sub != 0)
        throw Error("norm image size does not divide the unit group order");
    return phi / sub;
}

} // namespace

namespace {
std::atomic<unsigned> g_precision_margin{8};
} // namespace

unsigned precision_margin()
{
    return g_precision_margin.load();
}

void set_precision_margin(unsigned margin)
{
    g_precision_margin.store(margin);
}

Int norm_image_index(const LocalFieldFactor& factor, const Int& p, unsigned k)
{
    return norm_image_index(factor, p, k, k + precision_margin());
}

Int norm_image_index(const LocalFieldFactor& factor, const Int& p, unsigned k, unsigned k_max)
{
    if (k < 1)
        throw ValidationError("precision k must be >= 1");
    Int prev = norm_image_index_at(factor, p, k);
    for (unsigned j = k + 1; j <= k_max + 1; ++j) {
        Int cur = norm_image_index_at(factor, p, j);
        if (cur == prev)
            return cur;
        prev = cur;
    }
    throw PrecisionNotStabilized("norm image index did not stabilize below precision " +
                                 std::to_string(k_max));
}

Int scaling_index_closed_form(const Int& p, unsigned m)
{
    if (m == 0)
        return 1;
    return (p - 1) * ipow(p, m - 1);
}

CharacterImage character_image(const LocalFieldFactor& factor, long norm_or_scale_exponent,
                               const Int& p, unsigned k)
{
    LocalUnitGroup ug = unit_group_generators(factor, p, k);
    std::uint64_t mod = ug.ring.modulus();
    std::vector<std::uint64_t> img;
    unsigned long e_abs = static_cast<unsigned long>(std::abs(norm_or_scale_exponent));
    for (const auto& g : ug.gens) {
        std::uint64_t base = factor.kind == LocalFieldFactor::Kind::rational ? g[0] : ug.ring.norm(g);
        std::uint64_t val = powmod64(base, Int(e_abs), mod);
        if (norm_or_scale_exponent < 0)
            val = invmod64(val, mod);
        img.push_back(val);
    }
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    Int phi = ipow(p, k) - ipow(p, k - 1);
    Int sub = closure_size_mod(img, mod);
    if (phi % sub != 0)
        throw Error("character image size does not divide the unit group order");
    return CharacterImage{p, k, img, sub, phi / sub};
}

namespace {

Int stabilizer_index_at(const std::vector<LocalFieldFactor>& factors,
                        const std::vector<LocalConstraint>& constraints,
                        unsigned level_depth, const Int& p, unsigned k)
{
    // Active character constraints carry one residue slot each; a positive
    // level depth adds the full coefficient vector of every factor.
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < constraints.size(); ++i)
        if (constraints[i].depth >= 1)
            active.push_back(i);
    std::vector<std::uint64_t> cons_mod;
    for (std::size_t i : active)
        cons_mod.push_back(to_u64_checked(ipow(p, constraints[i].depth)));

    std::vector<LocalUnitGroup> groups;
    for (const auto& f : factors) {
        if (k < 1)
            throw ValidationError("precision k must be >= 1");
        groups.push_back(unit_group_generators(f, p, k));
    }
    std::vector<ResidueRing> level_rings;
    std::uint64_t level_mod = 0;
    if (level_depth >= 1) {
        level_mod = to_u64_checked(ipow(p, level_depth));
        for (const auto& f : factors)
            level_rings.emplace_back(p, level_depth, f.min_poly());
    }

    using State = std::vector<std::uint64_t>;
    State identity;
    for (std::uint64_t m : cons_mod)
        identity.push_back(1 % m);
    if (level_depth >= 1)
        for (const auto& r : level_rings) {
            auto one = r.one();
            identity.insert(identity.end(), one.begin(), one.end());
        }
    if (identity.empty())
        return 1;

    // One action per generator of every factor's unit group.
    std::vector<State> actions;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        for (const auto& g : groups[j].gens) {
            State act;
            for (std::size_t idx = 0; idx < active.size(); ++idx) {
                const LocalConstraint& c = constraints[active[idx]];
                std::uint64_t m = cons_mod[idx];
                std::uint64_t val = 1 % m;
                for (const LocalBlockChar& part : c.parts) {
                    if (part.block != j)
                        continue;
                    std::uint64_t base =
                        factors[j].kind == LocalFieldFactor::Kind::rational ? g[0] : groups[j].ring.norm(g);
                    base %= m;
                    std::uint64_t contrib = powmod64(base, Int(std::abs(part.exponent)), m);
                    if (part.exponent < 0)
                        contrib = invmod64(contrib, m);
                    val = mulmod64(val, contrib, m);
                }
                act.push_back(val);
            }
            if (level_depth >= 1)
                for (std::size_t jj = 0; jj < factors.size(); ++jj) {
                    ResidueRing::Elt slot = jj == j
                        ? level_rings[jj].reduce_coeffs(g, level_mod)
                        : level_rings[jj].one();
                    act.insert(act.end(), slot.begin(), slot.end());
                }
            actions.push_back(std::move(act));
        }
    }

    auto apply = [&](const State& s, const State& a) {
        State out(s.size());
        std::size_t pos = 0;
        for (std::size_t idx = 0; idx < active.size(); ++idx, ++pos)
            out[pos] = mulmod64(s[pos], a[pos], cons_mod[idx]);
        if (level_depth >= 1)
            for (std::size_t jj = 0; jj < factors.size(); ++jj) {
                std::size_t d = level_rings[jj].deg();
                ResidueRing::Elt x(s.begin() + pos, s.begin() + pos + d);
                ResidueRing::Elt y(a.begin() + pos, a.begin() + pos + d);
                ResidueRing::Elt z = level_rings[jj].mul(x, y);
                std::copy(z.begin(), z.end(), out.begin() + pos);
                pos += d;
            }
        return out;
    };

    std::unordered_set<State, VecHash> seen;
    std::deque<State> work;
    seen.insert(identity);
    work.push_back(identity);
    while (!work.empty()) {
        State cur = work.front();
        work.pop_front();
        for (const State& a : actions) {
            State nxt = apply(cur, a);
            if (seen.insert(nxt).second) {
                if (seen.size() > kClosureCap)
                    throw Unsupported("stabilizer orbit exceeded the enumeration cap");
                work.push_back(nxt);
            }
        }
    }
    return Int(static_cast<unsigned long>(seen.size()));
}

} // namespace

Int stabilizer_index(const std::vector<LocalFieldFactor>& factors,
                     const std::vector<LocalConstraint>& constraints,
                     unsigned level_depth, const Int& p, unsigned k)
{
    unsigned need = level_depth;
    for (const auto& c : constraints)
        need = std::max(need, c.depth);
    if (k < need)
        throw ValidationError("precision k below the required constraint depth");
    Int first = stabilizer_index_at(factors, constraints, level_depth, p, k);
    Int second = stabilizer_index_at(factors, constraints, level_depth, p, k + 1);
    if (first != second)
        throw PrecisionNotStabilized("stabilizer index changed between precisions " +
                                     std::to_string(k) + " and " + std::to_string(k + 1));
    return first;
}

} // namespace testinv::localtori
