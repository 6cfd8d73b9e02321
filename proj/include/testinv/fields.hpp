#pragma once

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "testinv/numutil.hpp"

namespace testinv::fields {

/// An abelian number field as the fixed field of a subgroup H of (Z/n)^×
/// inside the n-th cyclotomic field. The degenerate modulus n = 1 denotes Q.
class AbelianFieldSpec {
public:
    AbelianFieldSpec(unsigned long modulus, std::vector<unsigned long> subgroup);

    static AbelianFieldSpec rationals();
    /// Field Q(sqrt(d)) for a fundamental discriminant d.
    static AbelianFieldSpec quadratic(long d);
    /// Full cyclotomic field Q(zeta_n); n ≡ 2 (mod 4) is folded to n/2.
    static AbelianFieldSpec cyclotomic(unsigned long n);

    unsigned long modulus() const { return n_; }
    const std::vector<unsigned long>& subgroup() const { return h_; }
    unsigned long degree() const;
    bool is_rational() const { return degree() == 1; }
    /// Whether the field is totally real (complex conjugation -1 lies in H).
    bool is_real() const;
    /// Signed fundamental discriminant when the field is quadratic.
    std::optional<long> quadratic_discriminant() const;
    /// The modulus when the spec denotes a full cyclotomic field.
    std::optional<unsigned long> cyclotomic_modulus() const;

    /// Canonical "n:h1,h2,..." key used by the cache file.
    std::string cache_key() const;

    static AbelianFieldSpec compositum(const AbelianFieldSpec& a, const AbelianFieldSpec& b);

    bool operator==(const AbelianFieldSpec&) const = default;
    bool operator<(const AbelianFieldSpec& o) const
    {
        return n_ != o.n_ ? n_ < o.n_ : h_ < o.h_;
    }

private:
    unsigned long n_;
    std::vector<unsigned long> h_; // sorted, contains 1 (empty when n = 1)
};

/// |disc F| via the conductor-discriminant formula: the product of the
/// conductors of the Dirichlet characters of (Z/n)^× / H.
Int abelian_field_discriminant(const AbelianFieldSpec& f);

/// Independent route: |disc Phi_n| as the resultant of Phi_n and Phi_n'.
/// Requires n >= 3.
Int cyclotomic_poly_disc_oracle(unsigned long n);

/// Coefficients of the n-th cyclotomic polynomial, constant term first.
std::vector<Int> cyclotomic_polynomial(unsigned long n);

/// Number of reduced primitive forms (a,b,c) of discriminant d < 0:
/// |b| <= a <= c with b >= 0 when |b| = a or a = c. d must be fundamental.
Int quadratic_class_number(const Int& d);

/// Class number of the real quadratic field of fundamental discriminant
/// 0 < d <= 200, via reduced indefinite forms and a Pell-based norm test.
Int real_quadratic_class_number(long d);

struct PellSolution {
    Int x, y;
};

/// Least positive solution of x^2 - d y^2 = 1 for d > 1 nonsquare.
PellSolution pell_fundamental(const Int& d);

/// Decomposition data of a rational prime in an abelian field.
struct LocalSplitting {
    Int p;
    unsigned long e = 1, f = 1, g = 1; // e*f*g = degree
};

LocalSplitting local_splitting(const AbelianFieldSpec& field, const Int& p);

bool is_fundamental_discriminant(long d);

/// Optional persisted memo of class numbers and discriminants. Line format:
/// "h <d> <value>" or "disc <field-key> <value>". Concurrent readers are
/// fine; writers are serialized.
class FieldCache {
public:
    void load(const std::string& path);
    void save(const std::string& path) const;

    std::optional<Int> get_class_number(const Int& d) const;
    void put_class_number(const Int& d, const Int& h);
    std::optional<Int> get_discriminant(const std::string& field_key) const;
    void put_discriminant(const std::string& field_key, const Int& disc);

private:
    mutable std::shared_mutex mu_;
    std::map<std::string, Int> h_;
    std::map<std::string, Int> disc_;
};

} // namespace testinv::fields
