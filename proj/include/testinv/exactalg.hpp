#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "testinv/numutil.hpp"

namespace testinv::exactalg {

using QVec = std::vector<Rat>;
using IVec = std::vector<Int>;

/// Dense matrix of arbitrary-precision integers, row-major.
class IntMatrix {
public:
    IntMatrix(std::size_t rows, std::size_t cols);
    static IntMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Int& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    IntMatrix transpose() const;
    IntMatrix mul(const IntMatrix& rhs) const;
    IVec mul(const IVec& v) const;

    void swap_cols(std::size_t a, std::size_t b);
    void swap_rows(std::size_t a, std::size_t b);
    // col_j += factor * col_src  /  row_i += factor * row_src
    void add_col_multiple(std::size_t j, std::size_t src, const Int& factor);
    void add_row_multiple(std::size_t i, std::size_t src, const Int& factor);
    void negate_col(std::size_t j);
    void negate_row(std::size_t i);

    bool operator==(const IntMatrix&) const = default;

private:
    std::size_t rows_, cols_;
    std::vector<Int> e_;
};

/// Determinant of a square integer matrix (Bareiss, fraction-free).
Int det(const IntMatrix& m);

/// Column-style Hermite normal form: same integer column span, column
/// echelon with positive pivots, entries left of a pivot reduced into
/// [0, pivot).
IntMatrix hnf(const IntMatrix& m);

/// Whether x lies in the integer column span of m.
bool in_column_span(const IntMatrix& m, const IVec& x);

struct SnfResult {
    std::vector<Int> diag; // d1 | d2 | ..., all >= 0
    IntMatrix u, v;        // unimodular, u*m*v = diag
};

SnfResult snf(const IntMatrix& m);

/// Basis of the integer kernel {z : m z = 0}, as matrix columns.
IntMatrix integer_kernel(const IntMatrix& m);

/// Dense matrix of exact rationals, row-major.
class QMatrix {
public:
    QMatrix(std::size_t rows, std::size_t cols);
    static QMatrix identity(std::size_t n);
    static QMatrix from_columns(const std::vector<QVec>& cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rat& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Rat& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    QMatrix transpose() const;
    QMatrix mul(const QMatrix& rhs) const;
    QVec mul(const QVec& v) const;

    Rat det() const;
    std::optional<QMatrix> inverse() const;
    std::size_t rank() const;

    // Least common multiple of all entry denominators.
    Int denominator_lcm() const;

    bool operator==(const QMatrix&) const = default;

private:
    std::size_t rows_, cols_;
    std::vector<Rat> e_;
};

/// Full-rank lattice in Q^n given by an invertible basis matrix whose
/// columns are the basis vectors.
class QLattice {
public:
    explicit QLattice(QMatrix basis);
    static QLattice standard(std::size_t n);

    std::size_t dim() const { return basis_.rows(); }
    const QMatrix& basis() const { return basis_; }
    const QMatrix& basis_inverse() const { return inv_; }
    const Rat& basis_det() const { return det_; }

    /// Coordinates of v in this basis.
    QVec coords(const QVec& v) const;
    bool contains(const QVec& v) const;

    bool operator==(const QLattice&) const = default;

private:
    QMatrix basis_;
    QMatrix inv_;
    Rat det_;
};

/// [L_big : L_small] as an exact integer; throws NotSublattice when the
/// containment L_small <= L_big fails.
Int lattice_index(const QLattice& big, const QLattice& small);

/// The p-order of w relative to L: the unique m >= 0 with
/// n*w in L (p-locally) iff p^m | n.
long p_order_in_lattice(const QVec& w, const QLattice& lat, const Int& p);

/// A lattice for every prime: one default used at all but finitely many
/// primes plus explicit exceptions.
class PrimeLattices {
public:
    explicit PrimeLattices(QLattice default_lattice);
    static PrimeLattices standard(std::size_t n);

    std::size_t dim() const { return default_.dim(); }
    const QLattice& default_lattice() const { return default_; }
    const std::map<Int, QLattice>& exceptions() const { return exceptions_; }
    void set_exception(const Int& p, QLattice lat);
    const QLattice& at(const Int& p) const;

private:
    QLattice default_;
    std::map<Int, QLattice> exceptions_;
};

/// Primes that can carry a nonzero p-order of w: divisors of the
/// denominators of w in the default basis plus all exception primes.
std::vector<Int> order_candidate_primes(const QVec& w, const PrimeLattices& lats);

/// The least n > 0 with n*w in every local lattice.
Int order_in_lattice(const QVec& w, const PrimeLattices& lats);

QLattice lattice_sum(const QLattice& a, const QLattice& b);
QLattice lattice_intersection(const QLattice& a, const QLattice& b);

/// Basis of span(generators) ∩ L; generators must be linearly independent.
std::vector<QVec> sublattice_of_subspace(const std::vector<QVec>& span_basis, const QLattice& lat);

/// x reduced into the fundamental domain of L: x - B*floor(B^{-1} x).
QVec reduce_mod_lattice(const QVec& x, const QLattice& lat);

QVec add(const QVec& a, const QVec& b);
QVec sub(const QVec& a, const QVec& b);
QVec scale(const Rat& c, const QVec& a);

} // namespace testinv::exactalg
