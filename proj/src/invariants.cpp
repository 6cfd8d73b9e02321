#include "testinv/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>

#include "testinv/errors.hpp"

namespace testinv::inv {

namespace {

using exactalg::IntMatrix;
using exactalg::IVec;
using exactalg::PrimeLattices;
using exactalg::QLattice;
using exactalg::QMatrix;

std::string qvec_str(const QVec& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ",";
        out += rat_str(v[i]);
    }
    return out + "]";
}

// Residue of a p-integral rational mod q = p^e.
Int rat_residue(const Rat& x, const Int& q)
{
    Int num = x.get_num() % q;
    if (num < 0)
        num += q;
    Int den = x.get_den() % q;
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), q.get_mpz_t()) == 0)
        throw Error("residue of a non p-integral rational");
    return (num * inv) % q;
}

// Particular solution of A z ≡ b (mod p^e), if any.
std::optional<IVec> solve_linear_mod_prime_power(const IntMatrix& a, const IVec& b, const Int& p,
                                                 unsigned e)
{
    std::size_t n = a.rows(), r = a.cols();
    if (e == 0)
        return IVec(r, Int(0));
    Int q = ipow(p, e);
    exactalg::SnfResult s = exactalg::snf(a);
    IVec c = s.u.mul(b);
    IVec y(r, Int(0));
    for (std::size_t i = 0; i < n; ++i) {
        Int d = i < s.diag.size() ? s.diag[i] : Int(0);
        Int ci = c[i] % q;
        if (ci < 0)
            ci += q;
        if (d == 0) {
            if (ci != 0)
                return std::nullopt;
            continue;
        }
        unsigned v = static_cast<unsigned>(std::min<long>(valuation(d, p), e));
        Int pv = ipow(p, v);
        if (ci % pv != 0)
            return std::nullopt;
        Int rest = ipow(p, e - v);
        if (rest == 1) {
            // y_i free mod p^0; keep 0
            continue;
        }
        Int unit = (d / pv) % rest;
        if (unit < 0)
            unit += rest;
        Int inv;
        if (mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), rest.get_mpz_t()) == 0)
            return std::nullopt;
        y[i] = ((ci / pv) * inv) % rest;
    }
    IVec z = s.v.mul(y);
    for (Int& zi : z) {
        zi %= q;
        if (zi < 0)
            zi += q;
    }
    // Hard check: the SNF bookkeeping must reproduce a genuine solution.
    IVec az = a.mul(z);
    for (std::size_t i = 0; i < n; ++i) {
        Int diff = (az[i] - b[i]) % q;
        if (diff != 0)
            return std::nullopt;
    }
    return z;
}

} // namespace

TorusFactor TorusFactor::split(unsigned long rank)
{
    TorusFactor f;
    f.kind = Kind::split;
    f.rank = rank;
    return f;
}

TorusFactor TorusFactor::weil(fields::AbelianFieldSpec field)
{
    TorusFactor f;
    f.kind = Kind::weil;
    f.rank = 0;
    f.field = std::move(field);
    return f;
}

TorusFactor TorusFactor::norm_one(fields::AbelianFieldSpec field)
{
    TorusFactor f;
    f.kind = Kind::norm_one;
    f.rank = 0;
    f.field = std::move(field);
    return f;
}

fields::AbelianFieldSpec TorusFactor::splitting_field() const
{
    if (kind == Kind::split)
        return fields::AbelianFieldSpec::rationals();
    return *field;
}

void TorusSpec::validate() const
{
    if (factors.empty())
        throw ValidationError("torus needs at least one factor");
    for (const TorusFactor& f : factors) {
        if (f.kind == TorusFactor::Kind::split) {
            if (f.rank == 0)
                throw ValidationError("split factor must have positive rank");
        } else if (!f.field) {
            throw ValidationError("field factor without a field spec");
        }
    }
    if (class_number_override && *class_number_override <= 0)
        throw ValidationError("class number override must be positive");
}

std::string TorusSpec::signature() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i)
            os << '*';
        const TorusFactor& f = factors[i];
        switch (f.kind) {
        case TorusFactor::Kind::split:
            os << "split(" << f.rank << ')';
            break;
        case TorusFactor::Kind::weil:
            os << "weil(" << f.field->cache_key() << ')';
            break;
        case TorusFactor::Kind::norm_one:
            os << "normone(" << f.field->cache_key() << ')';
            break;
        }
    }
    return os.str();
}

bool CharacterSpec::is_trivial() const
{
    for (const CharacterComponent& c : components) {
        if (c.is_norm) {
            if (c.norm_power != 0)
                return false;
        } else {
            for (long e : c.exponents)
                if (e != 0)
                    return false;
        }
    }
    return true;
}

std::string CharacterSpec::key() const
{
    std::vector<std::pair<std::size_t, std::string>> parts;
    for (const CharacterComponent& c : components) {
        std::ostringstream os;
        if (c.is_norm) {
            if (c.norm_power == 0)
                continue;
            os << "norm:" << c.norm_power;
        } else {
            bool all_zero = true;
            os << "exp:";
            for (std::size_t i = 0; i < c.exponents.size(); ++i) {
                if (i)
                    os << ',';
                os << c.exponents[i];
                if (c.exponents[i] != 0)
                    all_zero = false;
            }
            if (all_zero)
                continue;
        }
        parts.emplace_back(c.factor, os.str());
    }
    std::sort(parts.begin(), parts.end());
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            os << '|';
        os << 'f' << parts[i].first << ':' << parts[i].second;
    }
    return os.str();
}

void SubvarietyDatum::validate() const
{
    torus.validate();
    if (w.u.size() != psi.dim_u() || w.v.size() != psi.dim_v())
        throw DimensionMismatch("w does not match psi's dimensions");

    std::vector<int> seen_u(psi.dim_u(), 0), seen_v(psi.dim_v(), 0);
    for (const ActionBlock& b : action) {
        if (b.coords.empty())
            throw ValidationError("empty action block");
        for (std::size_t c : b.coords) {
            auto& seen = b.in_u ? seen_u : seen_v;
            std::size_t lim = b.in_u ? psi.dim_u() : psi.dim_v();
            if (c >= lim)
                throw ValidationError("action block coordinate out of range");
            if (seen[c]++)
                throw ValidationError("action blocks overlap");
        }
        std::set<std::size_t> factors_seen;
        for (const CharacterComponent& comp : b.chi.components) {
            if (comp.factor >= torus.factors.size())
                throw ValidationError("character references a missing torus factor");
            if (!factors_seen.insert(comp.factor).second)
                throw ValidationError("character has two components on one factor");
            const TorusFactor& f = torus.factors[comp.factor];
            switch (f.kind) {
            case TorusFactor::Kind::split:
                if (comp.is_norm)
                    throw UnsupportedCharacter("norm character on a split factor");
                if (comp.exponents.size() != f.rank)
                    throw ValidationError("exponent vector does not match the split rank");
                break;
            case TorusFactor::Kind::weil:
                if (!comp.is_norm)
                    throw UnsupportedCharacter("weil factors carry only norm powers");
                break;
            case TorusFactor::Kind::norm_one:
                throw UnsupportedCharacter("norm-one factors have no rational characters");
            }
        }
    }
    for (std::size_t i = 0; i < psi.dim_u(); ++i)
        if (!seen_u[i])
            throw ValidationError("U coordinate " + std::to_string(i) + " not covered by a block");
    for (std::size_t i = 0; i < psi.dim_v(); ++i)
        if (!seen_v[i])
            throw ValidationError("V coordinate " + std::to_string(i) + " not covered by a block");

    if (!w_prime_basis.empty()) {
        for (const QVec& v : w_prime_basis)
            if (v.size() != dim_w())
                throw DimensionMismatch("W' basis vector has wrong length");
        if (QMatrix::from_columns(w_prime_basis).rank() != w_prime_basis.size())
            throw ValidationError("W' basis vectors are linearly dependent");
    }
}

void LevelSpec::set_w_lattice(const Int& p, exactalg::QLattice lat)
{
    if (!is_prime(p))
        throw ValidationError("level exception at a non-prime: " + p.get_str());
    exceptions_[p].w_lattice = std::move(lat);
}

void LevelSpec::set_t_depth(const Int& p, unsigned depth)
{
    if (!is_prime(p))
        throw ValidationError("level exception at a non-prime: " + p.get_str());
    exceptions_[p].t_depth = depth;
}

unsigned LevelSpec::t_depth_at(const Int& p) const
{
    auto it = exceptions_.find(p);
    return it == exceptions_.end() ? 0 : it->second.t_depth;
}

PrimeLattices LevelSpec::w_lattices(std::size_t dim) const
{
    PrimeLattices out = PrimeLattices::standard(dim);
    for (const auto& [p, ex] : exceptions_) {
        if (ex.w_lattice) {
            if (ex.w_lattice->dim() != dim)
                throw DimensionMismatch("level lattice at p=" + p.get_str() + " has wrong dimension");
            out.set_exception(p, *ex.w_lattice);
        } else {
            out.set_exception(p, QLattice::standard(dim));
        }
    }
    return out;
}

exactalg::QLattice LevelSpec::global_lattice(std::size_t dim) const
{
    QLattice g = QLattice::standard(dim);
    for (const auto& [p, ex] : exceptions_)
        if (ex.w_lattice)
            g = exactalg::lattice_intersection(g, *ex.w_lattice);
    return g;
}

void BoundConstants::validate() const
{
    if (b <= 0 || c_N <= 0 || c0 <= 0)
        throw ValidationError("bound constants must be positive");
    if (N == 0)
        throw ValidationError("N must be positive");
}

namespace {

// Flattened local picture of a datum: one local block per split rank slot
// or ring factor, merged characters with their local parts, and the global
// W coordinates of every action block.
struct LocalContext {
    std::vector<localtori::LocalFieldFactor> blocks;
    bool has_norm_one = false;
    std::vector<MergedBlock> merged;
    std::vector<std::vector<localtori::LocalBlockChar>> merged_parts;
    std::vector<std::vector<std::size_t>> action_coords; // per action block, global coords
};

LocalContext build_local_context(const SubvarietyDatum& datum)
{
    datum.validate();
    LocalContext ctx;

    // Flatten torus factors into local blocks.
    std::vector<std::size_t> factor_base(datum.torus.factors.size(), 0);
    for (std::size_t i = 0; i < datum.torus.factors.size(); ++i) {
        const TorusFactor& f = datum.torus.factors[i];
        factor_base[i] = ctx.blocks.size();
        switch (f.kind) {
        case TorusFactor::Kind::split:
            for (unsigned long r = 0; r < f.rank; ++r)
                ctx.blocks.push_back(localtori::LocalFieldFactor::rational());
            break;
        case TorusFactor::Kind::weil:
            ctx.blocks.push_back(localtori::LocalFieldFactor::from_field(*f.field));
            break;
        case TorusFactor::Kind::norm_one:
            ctx.has_norm_one = true;
            break;
        }
    }

    ctx.merged = decompose_scaling(datum.torus, datum.action);
    for (const MergedBlock& m : ctx.merged) {
        std::vector<localtori::LocalBlockChar> parts;
        for (const CharacterComponent& comp : m.chi.components) {
            const TorusFactor& f = datum.torus.factors[comp.factor];
            if (f.kind == TorusFactor::Kind::split) {
                for (std::size_t s = 0; s < comp.exponents.size(); ++s)
                    if (comp.exponents[s] != 0)
                        parts.push_back({factor_base[comp.factor] + s, comp.exponents[s]});
            } else if (f.kind == TorusFactor::Kind::weil) {
                if (comp.norm_power != 0)
                    parts.push_back({factor_base[comp.factor], comp.norm_power});
            }
        }
        ctx.merged_parts.push_back(std::move(parts));
    }

    for (const ActionBlock& b : datum.action) {
        std::vector<std::size_t> coords;
        for (std::size_t c : b.coords)
            coords.push_back(b.in_u ? c : datum.psi.dim_u() + c);
        ctx.action_coords.push_back(std::move(coords));
    }
    return ctx;
}

// The lattice a block sees at p: the basis columns of the full W-lattice
// supported inside that block, restricted to the block's coordinates.
// Level lattices must split along the action blocks.
QLattice block_lattice(const QLattice& full, std::size_t block,
                       const std::vector<std::vector<std::size_t>>& all_coords)
{
    std::size_t n = full.dim();
    const std::vector<std::size_t>& coords = all_coords[block];
    std::vector<int> owner(n, -1);
    for (std::size_t b = 0; b < all_coords.size(); ++b)
        for (std::size_t c : all_coords[b])
            owner[c] = static_cast<int>(b);

    std::vector<std::size_t> mine;
    for (std::size_t j = 0; j < n; ++j) {
        int col_owner = -2;
        for (std::size_t i = 0; i < n; ++i) {
            if (full.basis().at(i, j) == 0)
                continue;
            if (owner[i] < 0)
                throw ValidationError("level lattice touches a coordinate outside all blocks");
            if (col_owner == -2)
                col_owner = owner[i];
            else if (col_owner != owner[i])
                throw ValidationError("level lattice does not split along the action blocks");
        }
        if (col_owner == -2)
            throw ValidationError("level lattice has a zero basis column");
        if (col_owner == static_cast<int>(block))
            mine.push_back(j);
    }
    if (mine.size() != coords.size())
        throw ValidationError("level lattice rank mismatch on an action block");
    QMatrix b(coords.size(), coords.size());
    for (std::size_t jj = 0; jj < mine.size(); ++jj)
        for (std::size_t ii = 0; ii < coords.size(); ++ii)
            b.at(ii, jj) = full.basis().at(coords[ii], mine[jj]);
    return QLattice(std::move(b));
}

QVec restrict_coords(const QVec& x, const std::vector<std::size_t>& coords)
{
    QVec out;
    out.reserve(coords.size());
    for (std::size_t c : coords)
        out.push_back(x[c]);
    return out;
}

struct PrimeEval {
    long max_depth = 0;
    unsigned t_depth = 0;
    Int idx_full = Int(1);
    Int idx_level = Int(1);
};

PrimeEval eval_prime(const LocalContext& ctx, const QVec& w_flat, const LevelSpec& level,
                     const Int& p)
{
    PrimeEval out;
    out.t_depth = level.t_depth_at(p);
    if (out.t_depth >= 1 && ctx.has_norm_one)
        throw Unsupported("torus congruence levels are not supported on norm-one factors");

    PrimeLattices plats = level.w_lattices(w_flat.size());
    const QLattice& full = plats.at(p);

    std::vector<long> block_depth(ctx.action_coords.size(), 0);
    for (std::size_t b = 0; b < ctx.action_coords.size(); ++b) {
        QLattice lat = block_lattice(full, b, ctx.action_coords);
        block_depth[b] =
            exactalg::p_order_in_lattice(restrict_coords(w_flat, ctx.action_coords[b]), lat, p);
    }

    std::vector<localtori::LocalConstraint> constraints;
    for (std::size_t m = 0; m < ctx.merged.size(); ++m) {
        long depth = 0;
        for (std::size_t b : ctx.merged[m].block_indices)
            depth = std::max(depth, block_depth[b]);
        out.max_depth = std::max(out.max_depth, depth);
        constraints.push_back({ctx.merged_parts[m], static_cast<unsigned>(depth)});
    }

    unsigned k = static_cast<unsigned>(std::max<long>(out.max_depth, out.t_depth)) + 2;
    out.idx_full = localtori::stabilizer_index(ctx.blocks, constraints, out.t_depth, p, k);
    out.idx_level = out.t_depth >= 1
        ? localtori::stabilizer_index(ctx.blocks, {}, out.t_depth, p, k)
        : Int(1);
    return out;
}

std::vector<Int> candidate_primes(const QVec& w_flat, const LevelSpec& level)
{
    return exactalg::order_candidate_primes(w_flat, level.w_lattices(w_flat.size()));
}

} // namespace

std::vector<MergedBlock> decompose_scaling(const TorusSpec& torus,
                                           const std::vector<ActionBlock>& action)
{
    torus.validate();
    std::vector<MergedBlock> merged;
    std::map<std::string, std::size_t> by_key;
    for (std::size_t i = 0; i < action.size(); ++i) {
        const ActionBlock& b = action[i];
        if (b.chi.is_trivial())
            throw TrivialSubrepresentation("action block " + std::to_string(i) +
                                           " carries the trivial character");
        std::string key = b.chi.key();
        auto it = by_key.find(key);
        if (it == by_key.end()) {
            by_key.emplace(key, merged.size());
            merged.push_back(MergedBlock{b.chi, {i}});
        } else {
            merged[it->second].block_indices.push_back(i);
        }
    }
    return merged;
}

Int splitting_discriminant(const TorusSpec& torus, fields::FieldCache* cache)
{
    torus.validate();
    fields::AbelianFieldSpec f = fields::AbelianFieldSpec::rationals();
    for (const TorusFactor& factor : torus.factors)
        f = fields::AbelianFieldSpec::compositum(f, factor.splitting_field());
    if (cache) {
        if (auto hit = cache->get_discriminant(f.cache_key()))
            return *hit;
    }
    Int d = fields::abelian_field_discriminant(f);
    if (cache)
        cache->put_discriminant(f.cache_key(), d);
    return d;
}

std::pair<std::vector<Int>, std::vector<Int>> defect_primes(const SubvarietyDatum& datum,
                                                            const LevelSpec& level)
{
    LocalContext ctx = build_local_context(datum);
    QVec w_flat = heis::flatten(datum.w);
    std::vector<Int> big, small;
    for (const Int& p : candidate_primes(w_flat, level)) {
        PrimeEval pe = eval_prime(ctx, w_flat, level, p);
        if (pe.max_depth >= 1 || pe.t_depth >= 1)
            big.push_back(p);
        if (pe.max_depth > static_cast<long>(pe.t_depth))
            small.push_back(p);
    }
    return {big, small};
}

Rat unipotent_index_I(const SubvarietyDatum& datum, const LevelSpec& level, const Int& p,
                      const BoundConstants& constants)
{
    constants.validate();
    LocalContext ctx = build_local_context(datum);
    QVec w_flat = heis::flatten(datum.w);
    PrimeEval pe = eval_prime(ctx, w_flat, level, p);
    if (pe.max_depth < 1 && pe.t_depth < 1)
        throw ValidationError("p = " + p.get_str() + " is not a defect prime of this datum");
    return constants.b * Rat(pe.idx_full);
}

MinimizeResult minimize_over_coset(const heis::HeisenbergElement& w,
                                   const std::vector<QVec>& w_prime_basis,
                                   const LevelSpec& level, const heis::PolarizationForm& psi)
{
    QVec x = heis::flatten(w);
    std::size_t n = x.size();
    PrimeLattices plats = level.w_lattices(n);
    std::vector<Int> cands = candidate_primes(x, level);

    MinimizeResult res;
    if (w_prime_basis.empty()) {
        res.w_min = w;
        for (const Int& p : cands)
            res.orders[p] = exactalg::p_order_in_lattice(x, plats.at(p), p);
        return res;
    }

    // Integer-scaled basis of W' as matrix columns.
    std::size_t r = w_prime_basis.size();
    QMatrix bq = QMatrix::from_columns(w_prime_basis);
    if (bq.rank() != r)
        throw ValidationError("W' basis vectors are linearly dependent");
    IntMatrix bi(n, r);
    QMatrix bscaled(n, r);
    for (std::size_t j = 0; j < r; ++j) {
        Int den(1);
        for (std::size_t i = 0; i < n; ++i)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), bq.at(i, j).get_den().get_mpz_t());
        for (std::size_t i = 0; i < n; ++i) {
            Rat e = bq.at(i, j) * den;
            bi.at(i, j) = Int(e.get_num());
            bscaled.at(i, j) = e;
        }
    }

    // Quotient map C: rows span the annihilator of span(B).
    IntMatrix kern = exactalg::integer_kernel(bi.transpose());
    std::size_t sdim = kern.cols(); // = n - r
    QMatrix c(sdim, n);
    for (std::size_t i = 0; i < sdim; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c.at(i, j) = Rat(kern.at(j, i));

    // Per prime: the minimal achievable order is the order of the class of
    // w in W/W', then one congruence solve pins a correction with p-power
    // denominator only.
    std::map<Int, long> target_order;
    Int big_t(1);
    std::map<Int, long> tpow;
    std::map<Int, IVec> residue;
    std::map<Int, Int> residue_mod;
    for (const Int& p : cands) {
        const QLattice& lp = plats.at(p);
        long mstar = 0;
        if (sdim > 0) {
            QMatrix span = c.mul(lp.basis()); // sdim x n spanning set
            Int sc = span.denominator_lcm();
            IntMatrix si(sdim, n);
            for (std::size_t i = 0; i < sdim; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Rat e = span.at(i, j) * sc;
                    si.at(i, j) = Int(e.get_num());
                }
            IntMatrix h = exactalg::hnf(si);
            QMatrix qb(sdim, sdim);
            std::size_t col = 0;
            for (std::size_t j = 0; j < n && col < sdim; ++j) {
                bool nonzero = false;
                for (std::size_t i = 0; i < sdim; ++i)
                    if (h.at(i, j) != 0)
                        nonzero = true;
                if (!nonzero)
                    continue;
                for (std::size_t i = 0; i < sdim; ++i) {
                    Rat q(h.at(i, j), sc);
                    q.canonicalize();
                    qb.at(i, col) = q;
                }
                ++col;
            }
            if (col != sdim)
                throw Error("quotient lattice has deficient rank");
            QLattice qlat(qb);
            mstar = exactalg::p_order_in_lattice(c.mul(x), qlat, p);
        }
        target_order[p] = mstar;

        // Condition on z: p^{m*} A (x + B z / p^t) integral at p.
        Rat pm(ipow(p, static_cast<unsigned long>(mstar)));
        QMatrix m = lp.basis_inverse().mul(bscaled);
        QVec u = lp.basis_inverse().mul(x);
        long spow = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < r; ++j)
                if (m.at(i, j) != 0)
                    spow = std::max(spow, -std::min(0L, valuation(Rat(m.at(i, j) * pm), p)));
            if (u[i] != 0)
                spow = std::max(spow, -std::min(0L, valuation(Rat(u[i] * pm), p)));
        }
        long ord_here = exactalg::p_order_in_lattice(x, lp, p);
        long t_cap = ord_here + spow + mstar + 8;
        bool solved = false;
        for (long t = 0; t <= t_cap && !solved; ++t) {
            unsigned e = static_cast<unsigned>(t + spow);
            Int q = ipow(p, e);
            IntMatrix ai(n, r);
            IVec bv(n, Int(0));
            if (e > 0) {
                Rat ps(ipow(p, static_cast<unsigned long>(spow)));
                Rat pts(ipow(p, static_cast<unsigned long>(t + spow)));
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < r; ++j)
                        ai.at(i, j) = rat_residue(Rat(m.at(i, j) * pm * ps), q);
                    Rat rhs = -u[i] * pm * pts;
                    bv[i] = rat_residue(rhs, q);
                }
            }
            auto z = e == 0 ? std::optional<IVec>(IVec(r, Int(0)))
                            : solve_linear_mod_prime_power(ai, bv, p, e);
            if (!z)
                continue;
            solved = true;
            tpow[p] = t;
            residue[p] = *z;
            residue_mod[p] = ipow(p, static_cast<unsigned long>(t + spow + 1));
            big_t *= ipow(p, static_cast<unsigned long>(t));
        }
        if (!solved)
            throw Error("coset minimization congruence had no solution at p=" + p.get_str());
    }

    // Glue per-prime corrections: Z ≡ (T/p^t) z_p (mod p^{t+s+1}).
    IVec zz(r, Int(0));
    Int modulus(1);
    for (const Int& p : cands) {
        Int pm = residue_mod[p];
        Int scale = big_t / ipow(p, static_cast<unsigned long>(tpow[p]));
        for (std::size_t j = 0; j < r; ++j) {
            Int target = (scale * residue[p][j]) % pm;
            if (target < 0)
                target += pm;
            if (modulus == 1) {
                zz[j] = target;
            } else {
                // zz[j] ≡ previous (mod modulus), ≡ target (mod pm)
                Int minv;
                if (mpz_invert(minv.get_mpz_t(), modulus.get_mpz_t(), pm.get_mpz_t()) == 0)
                    throw Error("crt moduli not coprime");
                Int diff = (target - zz[j]) % pm;
                if (diff < 0)
                    diff += pm;
                zz[j] = zz[j] + modulus * ((diff * minv) % pm);
            }
        }
        modulus *= pm;
    }

    QVec correction(n, Rat(0));
    for (std::size_t j = 0; j < r; ++j) {
        Rat coeff(zz[j], big_t);
        coeff.canonicalize();
        for (std::size_t i = 0; i < n; ++i)
            correction[i] += bscaled.at(i, j) * coeff;
    }
    QVec w_raw = exactalg::add(x, correction);

    for (const Int& p : cands) {
        long got = exactalg::p_order_in_lattice(w_raw, plats.at(p), p);
        if (got != target_order[p])
            throw Error("coset minimization missed the quotient order at p=" + p.get_str());
    }

    // Remove the W' ∩ Γ_W ambiguity by rounding projection coefficients.
    QLattice gamma = level.global_lattice(n);
    std::vector<QVec> lambda_cols;
    {
        std::vector<QVec> span_cols;
        for (std::size_t j = 0; j < r; ++j) {
            QVec col(n);
            for (std::size_t i = 0; i < n; ++i)
                col[i] = bscaled.at(i, j);
            span_cols.push_back(col);
        }
        lambda_cols = exactalg::sublattice_of_subspace(span_cols, gamma);
    }
    QMatrix lambda = QMatrix::from_columns(lambda_cols);
    QMatrix lt = lambda.transpose();
    QMatrix gram = lt.mul(lambda);
    QMatrix gram_inv = *gram.inverse();
    QVec coeffs = gram_inv.mul(lt.mul(w_raw));
    QVec w_min = w_raw;
    for (std::size_t j = 0; j < lambda_cols.size(); ++j) {
        Int fl = floor_quot(Int(coeffs[j].get_num()), Int(coeffs[j].get_den()));
        if (fl != 0)
            w_min = exactalg::sub(w_min, exactalg::scale(Rat(fl), lambda_cols[j]));
    }

    for (const Int& p : cands) {
        long got = exactalg::p_order_in_lattice(w_min, plats.at(p), p);
        if (got != target_order[p])
            throw Error("lattice reduction disturbed the achieved order at p=" + p.get_str());
        res.orders[p] = got;
    }
    res.w_min = heis::unflatten(w_min, psi);
    return res;
}

namespace {

InvariantReport report_at(const LocalContext& ctx, const SubvarietyDatum& datum,
                          const LevelSpec& level, const BoundConstants& constants,
                          fields::FieldCache* cache, const heis::HeisenbergElement& w_eval)
{
    QVec x = heis::flatten(w_eval);
    InvariantReport rep;
    rep.w_min = w_eval;
    rep.D = splitting_discriminant(datum.torus, cache);
    rep.degenerate_D = rep.D == 1;
    rep.tau = Rat(rep.D);

    for (const Int& p : candidate_primes(x, level)) {
        PrimeEval pe = eval_prime(ctx, x, level, p);
        bool in_big = pe.max_depth >= 1 || pe.t_depth >= 1;
        if (!in_big)
            continue;
        bool in_small = pe.max_depth > static_cast<long>(pe.t_depth);
        rep.Delta.push_back(p);
        if (in_small)
            rep.delta.push_back(p);
        PrimeData pd;
        pd.index = pe.idx_full;
        pd.I = constants.b * Rat(pe.idx_full);
        pd.order = pe.max_depth;
        pd.t_depth = pe.t_depth;
        pd.in_delta = in_small;
        rep.primes.emplace(p, pd);
        rep.tau *= std::max(Rat(1), pd.I);
    }
    return rep;
}

} // namespace

InvariantReport test_invariant(const SubvarietyDatum& datum, const LevelSpec& level,
                               const BoundConstants& constants, fields::FieldCache* cache)
{
    constants.validate();
    LocalContext ctx = build_local_context(datum);
    MinimizeResult mr = minimize_over_coset(datum.w, datum.w_prime_basis, level, datum.psi);
    return report_at(ctx, datum, level, constants, cache, mr.w_min);
}

InvariantReport defect_report(const SubvarietyDatum& datum, const LevelSpec& level,
                              const BoundConstants& constants, fields::FieldCache* cache)
{
    constants.validate();
    LocalContext ctx = build_local_context(datum);
    return report_at(ctx, datum, level, constants, cache, datum.w);
}

LowerBoundResult lower_bound(const SubvarietyDatum& datum, const LevelSpec& level,
                             const BoundConstants& constants, fields::FieldCache* cache)
{
    InvariantReport rep = test_invariant(datum, level, constants, cache);
    LowerBoundResult out;
    if (rep.degenerate_D) {
        out.degenerate = true;
        out.value = 0;
        return out;
    }
    double logd = std::log(rep.D.get_d());
    double prod = Rat(rep.tau / Rat(rep.D)).get_d();
    out.value = constants.c_N.get_d() * std::pow(logd, static_cast<double>(constants.N)) * prod;
    return out;
}

Int class_number_T(const TorusSpec& torus, fields::FieldCache* cache)
{
    torus.validate();
    if (torus.class_number_override)
        return *torus.class_number_override;
    Int h(1);
    for (const TorusFactor& f : torus.factors) {
        switch (f.kind) {
        case TorusFactor::Kind::split:
            break;
        case TorusFactor::Kind::weil: {
            unsigned long deg = f.field->degree();
            if (deg == 1)
                break;
            if (deg != 2)
                throw Unsupported("class numbers of non-quadratic fields need an override");
            long d = *f.field->quadratic_discriminant();
            Int dz(d);
            if (cache) {
                if (auto hit = cache->get_class_number(dz)) {
                    h *= *hit;
                    break;
                }
            }
            Int hf = d < 0 ? fields::quadratic_class_number(dz) : fields::real_quadratic_class_number(d);
            if (cache)
                cache->put_class_number(dz, hf);
            h *= hf;
            break;
        }
        case TorusFactor::Kind::norm_one:
            throw Unsupported("norm-one factors need a class-number override");
        }
    }
    return h;
}

UpperBoundResult upper_bound(const SubvarietyDatum& datum, const LevelSpec& level,
                             const BoundConstants& constants, fields::FieldCache* cache)
{
    constants.validate();
    datum.validate();
    MinimizeResult mr = minimize_over_coset(datum.w, datum.w_prime_basis, level, datum.psi);
    UpperBoundResult out;
    out.class_number = class_number_T(datum.torus, cache);
    out.order_w = exactalg::order_in_lattice(heis::flatten(mr.w_min), level.w_lattices(datum.dim_w()));
    std::size_t dw = datum.dim_w();
    out.d_exponent = static_cast<unsigned long>(dw * dw);
    Int ord_pow = ipow(out.order_w, out.d_exponent);
    out.exact = constants.c0 * Rat(out.class_number) * Rat(ord_pow);
    out.value = out.exact.get_d();
    return out;
}

LevelSpec intersect_levels(const LevelSpec& level, const std::vector<QVec>& translates)
{
    LevelSpec out = level;
    if (translates.empty())
        return out;
    std::size_t n = translates.front().size();
    PrimeLattices plats = level.w_lattices(n);
    for (const QVec& w : translates) {
        if (w.size() != n)
            throw DimensionMismatch("translates have mixed dimensions");
        for (const Int& p : exactalg::order_candidate_primes(w, plats)) {
            long depth = exactalg::p_order_in_lattice(w, plats.at(p), p);
            if (depth > static_cast<long>(out.t_depth_at(p)))
                out.set_t_depth(p, static_cast<unsigned>(depth));
        }
    }
    return out;
}

Int level_relative_index(const SubvarietyDatum& datum, const LevelSpec& level)
{
    LocalContext ctx = build_local_context(datum);
    QVec w_flat = heis::flatten(datum.w);
    Int idx(1);
    for (const Int& p : candidate_primes(w_flat, level)) {
        PrimeEval pe = eval_prime(ctx, w_flat, level, p);
        if (pe.idx_full % pe.idx_level != 0)
            throw Error("index chain violated at p=" + p.get_str());
        idx *= pe.idx_full / pe.idx_level;
    }
    return idx;
}

ClassifyResult classify_sequence(const std::vector<std::pair<SubvarietyDatum, LevelSpec>>& items,
                                 const Rat& threshold, const BoundConstants& constants,
                                 fields::FieldCache* cache, bool parallel)
{
    ClassifyResult out;
    struct ItemResult {
        Rat tau;
        std::string signature;
        QVec w_class;
    };
    auto eval_one = [&](const std::pair<SubvarietyDatum, LevelSpec>& item) {
        InvariantReport rep = test_invariant(item.first, item.second, constants, cache);
        QVec flat = heis::flatten(rep.w_min);
        QLattice gamma = item.second.global_lattice(flat.size());
        QVec reduced = exactalg::reduce_mod_lattice(flat, gamma);
        return ItemResult{rep.tau, item.first.torus.signature(), reduced};
    };

    std::vector<ItemResult> results;
    if (parallel && items.size() > 1) {
        std::vector<std::future<ItemResult>> futs;
        futs.reserve(items.size());
        for (const auto& item : items)
            futs.push_back(std::async(std::launch::async, eval_one, std::cref(item)));
        for (auto& f : futs)
            results.push_back(f.get());
    } else {
        for (const auto& item : items)
            results.push_back(eval_one(item));
    }

    std::map<std::string, ClassRep> classes;
    for (const ItemResult& r : results) {
        out.taus.push_back(r.tau);
        if (out.max_tau < r.tau)
            out.max_tau = r.tau;
        std::string key = r.signature + "|" + qvec_str(r.w_class);
        classes.emplace(key, ClassRep{r.signature, r.w_class});
    }
    out.bounded = items.empty() || out.max_tau <= threshold;
    for (auto& [key, rep] : classes)
        out.classes.push_back(rep);
    return out;
}

} // namespace testinv::inv
