#pragma once

#include <cstdint>
#include <vector>

#include "testinv/fields.hpp"
#include "testinv/numutil.hpp"

namespace testinv::localtori {

/// One local block of a supported torus: Q itself, or the ring of integers
/// of a quadratic or full cyclotomic field, presented as Z[x]/(f).
struct LocalFieldFactor {
    enum class Kind { rational, quadratic, cyclotomic };

    Kind kind = Kind::rational;
    long quad_disc = 0;          // quadratic: fundamental discriminant
    unsigned long cyclo_n = 0;   // cyclotomic: modulus

    static LocalFieldFactor rational();
    static LocalFieldFactor from_field(const fields::AbelianFieldSpec& f);

    /// Monic minimal polynomial of the ring generator (constant term first);
    /// {0, 1} for the rational block.
    std::vector<Int> min_poly() const;
    unsigned long ring_degree() const;
    fields::AbelianFieldSpec field_spec() const;
};

/// Finite quotient ring Z[x]/(p^k, f) with f monic. Coefficients live in
/// uint64, products go through 128-bit intermediates, so p^k must stay
/// below 2^62.
class ResidueRing {
public:
    using Elt = std::vector<std::uint64_t>;

    ResidueRing(const Int& p, unsigned k, const std::vector<Int>& monic_min_poly);

    const Int& prime() const { return p_; }
    unsigned precision() const { return k_; }
    std::uint64_t modulus() const { return mod_; }
    std::size_t deg() const { return deg_; }

    Elt zero() const { return Elt(deg_, 0); }
    Elt one() const;
    Elt from_coeffs(const std::vector<Int>& coeffs) const;
    Elt mul(const Elt& a, const Elt& b) const;
    Elt pow(Elt base, Int exp) const; // exp >= 0
    bool is_unit(const Elt& a) const;

    /// Norm to Z/p^k as the determinant of the multiplication matrix.
    std::uint64_t norm(const Elt& a) const;

    /// All ring elements; guarded against blowup.
    std::vector<Elt> all_elements() const;

    Elt reduce_coeffs(const Elt& a, std::uint64_t to_modulus) const;

private:
    Int p_;
    unsigned k_;
    std::uint64_t mod_;
    std::size_t deg_;
    std::vector<std::uint64_t> f_; // minimal polynomial mod p^k, degree deg_
};

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod64(std::uint64_t base, const Int& exp, std::uint64_t m);
std::uint64_t invmod64(std::uint64_t a, std::uint64_t m);

/// Generators of (O/p^k)^× together with the block data of the primes
/// above p and the exact group order.
struct LocalUnitGroup {
    Int p;
    unsigned k = 1;
    std::vector<std::pair<unsigned long, unsigned long>> blocks; // (e, f) per prime over p
    ResidueRing ring;
    std::vector<ResidueRing::Elt> gens;
    Int order;
};

LocalUnitGroup unit_group_generators(const LocalFieldFactor& factor, const Int& p, unsigned k);

/// Order of the subgroup the published generators close over; equals
/// LocalUnitGroup::order exactly when the generators generate.
Int generator_closure_order(const LocalUnitGroup& group);

/// Size of the subgroup generated by `gens` inside (Z/modulus)^×.
Int closure_size_mod(const std::vector<std::uint64_t>& gens, std::uint64_t modulus);

/// Index of the unit-norm image in (Z/p^k)^×, stabilized over increasing
/// precision; throws PrecisionNotStabilized past k_max.
Int norm_image_index(const LocalFieldFactor& factor, const Int& p, unsigned k, unsigned k_max);
Int norm_image_index(const LocalFieldFactor& factor, const Int& p, unsigned k);

/// How far past the starting precision stabilization loops may search
/// before giving up (the CLI's --precision-max). Default 8.
unsigned precision_margin();
void set_precision_margin(unsigned margin);

/// (p-1)p^{m-1} for m >= 1, and 1 for m = 0: the index of the 1-units of
/// depth m in Z_p^×.
Int scaling_index_closed_form(const Int& p, unsigned m);

/// A character evaluated on one local block: t -> t^e on a rational block,
/// t -> Nm(t)^e on a ring block.
struct LocalBlockChar {
    std::size_t block = 0;
    long exponent = 1;
};

/// chi(t) ≡ 1 mod p^depth, with chi the product of the listed block parts.
struct LocalConstraint {
    std::vector<LocalBlockChar> parts;
    unsigned depth = 0;
};

/// Image of the maximal compact subgroup of one factor under a character,
/// as generators inside (Z/p^k)^×.
struct CharacterImage {
    Int p;
    unsigned k = 1;
    std::vector<std::uint64_t> gens;
    Int subgroup_order;
    Int index; // in (Z/p^k)^×
};

CharacterImage character_image(const LocalFieldFactor& factor, long norm_or_scale_exponent,
                               const Int& p, unsigned k);

/// Orbit size of the identity coset: the index
/// [K^max : {t : chi_i(t) ≡ 1 mod p^{m_i} for all i, t ≡ 1 mod p^{level_depth}}]
/// computed by breadth-first closure over generator images, re-verified at
/// precision k+1.
Int stabilizer_index(const std::vector<LocalFieldFactor>& factors,
                     const std::vector<LocalConstraint>& constraints,
                     unsigned level_depth, const Int& p, unsigned k);

} // namespace testinv::localtori
