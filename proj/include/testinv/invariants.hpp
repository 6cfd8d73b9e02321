#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "testinv/exactalg.hpp"
#include "testinv/fields.hpp"
#include "testinv/heisenberg.hpp"
#include "testinv/localtori.hpp"
#include "testinv/numutil.hpp"

namespace testinv::inv {

using exactalg::QVec;

/// One factor of a supported Q-torus.
struct TorusFactor {
    enum class Kind { split, weil, norm_one };

    Kind kind = Kind::split;
    unsigned long rank = 1;                          // split factors
    std::optional<fields::AbelianFieldSpec> field;   // weil / norm_one factors

    static TorusFactor split(unsigned long rank);
    static TorusFactor weil(fields::AbelianFieldSpec f);
    static TorusFactor norm_one(fields::AbelianFieldSpec f);

    fields::AbelianFieldSpec splitting_field() const;
    bool operator==(const TorusFactor&) const = default;
};

struct TorusSpec {
    std::vector<TorusFactor> factors;
    std::optional<Int> class_number_override;

    void validate() const;
    /// Canonical "split(1)*weil(4:1)" form used as the torus-class identity.
    std::string signature() const;
    bool operator==(const TorusSpec&) const = default;
};

/// Character of a torus: a product of per-factor pieces — an exponent
/// vector on a split factor, a power of the norm on a Weil restriction.
struct CharacterComponent {
    std::size_t factor = 0;
    bool is_norm = false;
    std::vector<long> exponents; // split: one per rank slot
    long norm_power = 0;         // weil restriction

    bool operator==(const CharacterComponent&) const = default;
};

struct CharacterSpec {
    std::vector<CharacterComponent> components;

    bool is_trivial() const;
    /// Canonical key: zero pieces dropped, factors sorted.
    std::string key() const;
    bool operator==(const CharacterSpec& o) const { return key() == o.key(); }
};

/// A coordinate block of W on which the torus acts through one character.
struct ActionBlock {
    bool in_u = true;
    std::vector<std::size_t> coords; // local indices inside the U or V part
    CharacterSpec chi;
};

struct SubvarietyDatum {
    TorusSpec torus;
    heis::PolarizationForm psi;
    heis::HeisenbergElement w;
    std::vector<ActionBlock> action;
    std::vector<QVec> w_prime_basis; // empty = no W' subspace

    std::size_t dim_w() const { return psi.dim_w(); }
    void validate() const;
};

/// Per-prime level data: maximal at all but finitely many primes.
class LevelSpec {
public:
    struct Exception {
        std::optional<exactalg::QLattice> w_lattice; // default Z^n when absent
        unsigned t_depth = 0;                        // K_{T,p} = {t ≡ 1 mod p^t_depth}

        bool operator==(const Exception&) const = default;
    };

    const std::map<Int, Exception>& exceptions() const { return exceptions_; }
    void set_w_lattice(const Int& p, exactalg::QLattice lat);
    void set_t_depth(const Int& p, unsigned depth);
    unsigned t_depth_at(const Int& p) const;

    exactalg::PrimeLattices w_lattices(std::size_t dim) const;
    /// The global integral lattice Γ_W = ∩_p (W(Q) ∩ K_{W,p}).
    exactalg::QLattice global_lattice(std::size_t dim) const;

    bool operator==(const LevelSpec&) const = default;

private:
    std::map<Int, Exception> exceptions_;
};

/// The ineffective constants of the bound formulas, exposed as exact
/// configuration with default 1 (and N = 2).
struct BoundConstants {
    Rat b = Rat(1);
    Rat c_N = Rat(1);
    Rat c0 = Rat(1);
    unsigned long N = 2;

    void validate() const;
};

struct PrimeData {
    Int index;         // [K^max : K_{T,p} ∩ Stab(w)]
    Rat I;             // b * index
    long order = 0;    // achieved p-order of w (max over blocks)
    unsigned t_depth = 0;
    bool in_delta = false;
};

struct InvariantReport {
    Int D = Int(1);
    std::vector<Int> Delta, delta; // ascending
    std::map<Int, PrimeData> primes;
    Rat tau = Rat(1);
    heis::HeisenbergElement w_min;
    bool degenerate_D = false; // D == 1
};

/// Blocks grouped by equal character; rejects trivial characters.
struct MergedBlock {
    CharacterSpec chi;
    std::vector<std::size_t> block_indices; // into datum.action
};

std::vector<MergedBlock> decompose_scaling(const TorusSpec& torus,
                                           const std::vector<ActionBlock>& action);

/// |disc| of the compositum of the factor splitting fields.
Int splitting_discriminant(const TorusSpec& torus, fields::FieldCache* cache = nullptr);

/// (Δ, δ) at the given w: Δ collects primes where w or the level imposes a
/// positive congruence depth, δ those where w's depth exceeds the level's.
std::pair<std::vector<Int>, std::vector<Int>> defect_primes(const SubvarietyDatum& datum,
                                                            const LevelSpec& level);

/// I(T, K_G(w)_p) = b * [K^max : K_{T,p} ∩ Stab(w)]; requires p in Δ.
Rat unipotent_index_I(const SubvarietyDatum& datum, const LevelSpec& level, const Int& p,
                      const BoundConstants& constants);

struct MinimizeResult {
    heis::HeisenbergElement w_min;
    std::map<Int, long> orders; // achieved p-orders, candidate primes only
};

/// A representative of w + W'(Q) minimizing every p-order of the class of w
/// in W/W' relative to the level lattices, with per-prime solutions glued by
/// the CRT and the W'-integral ambiguity removed by projection rounding.
MinimizeResult minimize_over_coset(const heis::HeisenbergElement& w,
                                   const std::vector<QVec>& w_prime_basis,
                                   const LevelSpec& level,
                                   const heis::PolarizationForm& psi);

InvariantReport test_invariant(const SubvarietyDatum& datum, const LevelSpec& level,
                               const BoundConstants& constants,
                               fields::FieldCache* cache = nullptr);

/// Same per-prime data as test_invariant but evaluated at the given w
/// without coset minimization (the `defects` command's view).
InvariantReport defect_report(const SubvarietyDatum& datum, const LevelSpec& level,
                              const BoundConstants& constants,
                              fields::FieldCache* cache = nullptr);

struct LowerBoundResult {
    double value = 0;
    bool degenerate = false; // D = 1, so (log D)^N = 0
};

LowerBoundResult lower_bound(const SubvarietyDatum& datum, const LevelSpec& level,
                             const BoundConstants& constants,
                             fields::FieldCache* cache = nullptr);

/// Class number of T at maximal level: the product over factors.
Int class_number_T(const TorusSpec& torus, fields::FieldCache* cache = nullptr);

struct UpperBoundResult {
    double value = 0;
    Rat exact = Rat(0);
    Int class_number = Int(1);
    Int order_w = Int(1);
    unsigned long d_exponent = 0; // (dim W)^2
};

UpperBoundResult upper_bound(const SubvarietyDatum& datum, const LevelSpec& level,
                             const BoundConstants& constants,
                             fields::FieldCache* cache = nullptr);

/// Deepen the torus part of the level until every listed w has its
/// stabilizer depth absorbed: t_depth'(p) = max(t_depth(p), ord_p(w_a)).
LevelSpec intersect_levels(const LevelSpec& level, const std::vector<QVec>& translates);

/// [K_T : K_T(w)] — the product over primes of the stabilizer index taken
/// relative to the level congruence subgroup.
Int level_relative_index(const SubvarietyDatum& datum, const LevelSpec& level);

struct ClassRep {
    std::string signature;
    QVec w_class; // minimized w reduced mod Γ_W
};

struct ClassifyResult {
    Rat max_tau = Rat(0);
    bool bounded = false;
    std::vector<Rat> taus;          // per item, input order
    std::vector<ClassRep> classes;  // canonical order
};

ClassifyResult classify_sequence(const std::vector<std::pair<SubvarietyDatum, LevelSpec>>& items,
                                 const Rat& threshold, const BoundConstants& constants,
                                 fields::FieldCache* cache = nullptr, bool parallel = true);

} // namespace testinv::inv
