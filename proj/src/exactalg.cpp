#include "testinv/exactalg.hpp"

#include <algorithm>
#include <limits>

#include "testinv/errors.hpp"

namespace testinv::exactalg {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

void check_same_dim(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

} // namespace

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, Int(0))
{
}

IntMatrix IntMatrix::identity(std::size_t n)
{
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t.at(j, i) = at(i, j);
    return t;
}

IntMatrix IntMatrix::mul(const IntMatrix& rhs) const
{
    check_same_dim(cols_, rhs.rows_, "matrix product");
    IntMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(i, k) == 0)
                continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out.at(i, j) += at(i, k) * rhs.at(k, j);
        }
    return out;
}

IVec IntMatrix::mul(const IVec& v) const
{
    check_same_dim(cols_, v.size(), "matrix-vector product");
    IVec out(rows_, Int(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out[i] += at(i, j) * v[j];
    return out;
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t i = 0; i < rows_; ++i)
        std::swap(at(i, a), at(i, b));
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t j = 0; j < cols_; ++j)
        std::swap(at(a, j), at(b, j));
}

void IntMatrix::add_col_multiple(std::size_t j, std::size_t src, const Int& factor)
{
    for (std::size_t i = 0; i < rows_; ++i)
        at(i, j) += factor * at(i, src);
}

void IntMatrix::add_row_multiple(std::size_t i, std::size_t src, const Int& factor)
{
    for (std::size_t j = 0; j < cols_; ++j)
        at(i, j) += factor * at(src, j);
}

void IntMatrix::negate_col(std::size_t j)
{
    for (std::size_t i = 0; i < rows_; ++i)
        at(i, j) = -at(i, j);
}

void IntMatrix::negate_row(std::size_t i)
{
    for (std::size_t j = 0; j < cols_; ++j)
        at(i, j) = -at(i, j);
}

Int det(const IntMatrix& m)
{
    if (m.rows() != m.cols())
        throw DimensionMismatch("determinant of non-square matrix");
    std::size_t n = m.rows();
    if (n == 0)
        return 1;
    IntMatrix a = m;
    Int prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            std::size_t pivot = npos;
            for (std::size_t i = k + 1; i < n; ++i)
                if (a.at(i, k) != 0) {
                    pivot = i;
                    break;
                }
            if (pivot == npos)
                return 0;
            a.swap_rows(k, pivot);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j);
                a.at(i, j) = num / prev; // Bareiss: division is exact
            }
        prev = a.at(k, k);
    }
    Int d = a.at(n - 1, n - 1);
    return sign > 0 ? d : Int(-d);
}

IntMatrix hnf(const IntMatrix& m)
{
    IntMatrix h = m;
    std::size_t pivot_col = 0;
    for (std::size_t row = 0; row < h.rows() && pivot_col < h.cols(); ++row) {
        // Reduce this row to a single nonzero entry among columns >= pivot_col.
        while (true) {
            std::size_t best = npos;
            for (std::size_t j = pivot_col; j < h.cols(); ++j) {
                if (h.at(row, j) == 0)
                    continue;
                if (best == npos || cmp(abs(h.at(row, j)), abs(h.at(row, best))) < 0)
                    best = j;
            }
            if (best == npos)
                break; // no pivot in this row
            h.swap_cols(best, pivot_col);
            bool cleared = true;
            for (std::size_t j = pivot_col + 1; j < h.cols(); ++j) {
                if (h.at(row, j) == 0)
                    continue;
                Int q = floor_quot(h.at(row, j), h.at(row, pivot_col));
                if (q != 0)
                    h.add_col_multiple(j, pivot_col, Int(-q));
                if (h.at(row, j) != 0)
                    cleared = false;
            }
            if (cleared)
                break;
        }
        if (h.at(row, pivot_col) == 0)
            continue; // row had no pivot; stay on the same pivot column
        if (h.at(row, pivot_col) < 0)
            h.negate_col(pivot_col);
        for (std::size_t j = 0; j < pivot_col; ++j) {
            Int q = floor_quot(h.at(row, j), h.at(row, pivot_col));
            if (q != 0)
                h.add_col_multiple(j, pivot_col, Int(-q));
        }
        ++pivot_col;
    }
    return h;
}

bool in_column_span(const IntMatrix& m, const IVec& x)
{
    check_same_dim(m.rows(), x.size(), "membership");
    IntMatrix h = hnf(m);
    // Pivot row of each column, ascending by construction.
    std::vector<std::size_t> pivot_row;
    for (std::size_t j = 0; j < h.cols(); ++j) {
        std::size_t r = npos;
        for (std::size_t i = 0; i < h.rows(); ++i)
            if (h.at(i, j) != 0) {
                r = i;
                break;
            }
        if (r == npos)
            break;
        pivot_row.push_back(r);
    }
    IVec y(pivot_row.size(), Int(0));
    std::size_t next_col = 0;
    for (std::size_t r = 0; r < h.rows(); ++r) {
        Int acc(0);
        for (std::size_t c = 0; c < next_col; ++c)
            acc += h.at(r, c) * y[c];
        Int need = x[r] - acc;
        if (next_col < pivot_row.size() && pivot_row[next_col] == r) {
            Int q, rem;
            mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), need.get_mpz_t(), h.at(r, next_col).get_mpz_t());
            if (rem != 0)
                return false;
            y[next_col] = q;
            ++next_col;
        } else if (need != 0) {
            return false;
        }
    }
    return true;
}

SnfResult snf(const IntMatrix& m)
{
    std::size_t rows = m.rows(), cols = m.cols();
    SnfResult res{std::vector<Int>(), IntMatrix::identity(rows), IntMatrix::identity(cols)};
    IntMatrix a = m;
    std::size_t t = 0;
    std::size_t bound = std::min(rows, cols);
    while (t < bound) {
        // Locate a nonzero pivot of minimal absolute value in the trailing block.
        std::size_t pi = npos, pj = npos;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (a.at(i, j) == 0)
                    continue;
                if (pi == npos || cmp(abs(a.at(i, j)), abs(a.at(pi, pj))) < 0) {
                    pi = i;
                    pj = j;
                }
            }
        if (pi == npos)
            break;
        a.swap_rows(t, pi);
        res.u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        res.v.swap_cols(t, pj);

        bool dirty = false;
        for (std::size_t i = t + 1; i < rows; ++i) {
            if (a.at(i, t) == 0)
                continue;
            Int q = floor_quot(a.at(i, t), a.at(t, t));
            if (q != 0) {
                a.add_row_multiple(i, t, Int(-q));
                res.u.add_row_multiple(i, t, Int(-q));
            }
            if (a.at(i, t) != 0)
                dirty = true;
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            if (a.at(t, j) == 0)
                continue;
            Int q = floor_quot(a.at(t, j), a.at(t, t));
            if (q != 0) {
                a.add_col_multiple(j, t, Int(-q));
                res.v.add_col_multiple(j, t, Int(-q));
            }
            if (a.at(t, j) != 0)
                dirty = true;
        }
        if (dirty)
            continue;
        // Pivot divides its row and column; enforce divisibility of the rest.
        bool fixed = false;
        for (std::size_t i = t + 1; i < rows && !fixed; ++i)
            for (std::size_t j = t + 1; j < cols && !fixed; ++j)
                if (a.at(i, j) % a.at(t, t) != 0) {
                    a.add_row_multiple(t, i, Int(1));
                    res.u.add_row_multiple(t, i, Int(1));
                    fixed = true;
                }
        if (fixed)
            continue;
        if (a.at(t, t) < 0) {
            a.negate_row(t);
            res.u.negate_row(t);
        }
        ++t;
    }
    res.diag.resize(bound, Int(0));
    for (std::size_t i = 0; i < bound; ++i)
        res.diag[i] = a.at(i, i);
    return res;
}

IntMatrix integer_kernel(const IntMatrix& m)
{
    SnfResult s = snf(m);
    std::vector<std::size_t> zero_cols;
    for (std::size_t j = 0; j < m.cols(); ++j) {
        Int d = j < s.diag.size() ? s.diag[j] : Int(0);
        if (d == 0)
            zero_cols.push_back(j);
    }
    IntMatrix out(m.cols(), zero_cols.size());
    for (std::size_t c = 0; c < zero_cols.size(); ++c)
        for (std::size_t i = 0; i < m.cols(); ++i)
            out.at(i, c) = s.v.at(i, zero_cols[c]);
    return out;
}

QMatrix::QMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), e_(rows * cols, Rat(0))
{
}

QMatrix QMatrix::identity(std::size_t n)
{
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m.at(i, i) = 1;
    return m;
}

QMatrix QMatrix::from_columns(const std::vector<QVec>& cols)
{
    if (cols.empty())
        return QMatrix(0, 0);
    std::size_t n = cols.front().size();
    QMatrix m(n, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        check_same_dim(cols[j].size(), n, "column length");
        for (std::size_t i = 0; i < n; ++i)
            m.at(i, j) = cols[j][i];
    }
    return m;
}

QMatrix QMatrix::transpose() const
{
    QMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t.at(j, i) = at(i, j);
    return t;
}

QMatrix QMatrix::mul(const QMatrix& rhs) const
{
    check_same_dim(cols_, rhs.rows_, "matrix product");
    QMatrix out(rows_, rhs.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            if (at(i, k) == 0)
                continue;
            for (std::size_t j = 0; j < rhs.cols_; ++j)
                out.at(i, j) += at(i, k) * rhs.at(k, j);
        }
    return out;
}

QVec QMatrix::mul(const QVec& v) const
{
    check_same_dim(cols_, v.size(), "matrix-vector product");
    QVec out(rows_, Rat(0));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            out[i] += at(i, j) * v[j];
    return out;
}

Rat QMatrix::det() const
{
    if (rows_ != cols_)
        throw DimensionMismatch("determinant of non-square matrix");
    QMatrix a = *this;
    Rat d(1);
    for (std::size_t k = 0; k < rows_; ++k) {
        std::size_t pivot = npos;
        for (std::size_t i = k; i < rows_; ++i)
            if (a.at(i, k) != 0) {
                pivot = i;
                break;
            }
        if (pivot == npos)
            return Rat(0);
        if (pivot != k) {
            for (std::size_t j = 0; j < cols_; ++j)
                std::swap(a.at(k, j), a.at(pivot, j));
            d = -d;
        }
        d *= a.at(k, k);
        Rat inv = 1 / a.at(k, k);
        for (std::size_t i = k + 1; i < rows_; ++i) {
            if (a.at(i, k) == 0)
                continue;
            Rat f = a.at(i, k) * inv;
            for (std::size_t j = k; j < cols_; ++j)
                a.at(i, j) -= f * a.at(k, j);
        }
    }
    return d;
}

std::optional<QMatrix> QMatrix::inverse() const
{
    if (rows_ != cols_)
        throw DimensionMismatch("inverse of non-square matrix");
    std::size_t n = rows_;
    QMatrix a = *this;
    QMatrix inv = QMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = npos;
        for (std::size_t i = k; i < n; ++i)
            if (a.at(i, k) != 0) {
                pivot = i;
                break;
            }
        if (pivot == npos)
            return std::nullopt;
        if (pivot != k)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a.at(k, j), a.at(pivot, j));
                std::swap(inv.at(k, j), inv.at(pivot, j));
            }
        Rat f = 1 / a.at(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            a.at(k, j) *= f;
            inv.at(k, j) *= f;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a.at(i, k) == 0)
                continue;
            Rat g = a.at(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                a.at(i, j) -= g * a.at(k, j);
                inv.at(i, j) -= g * inv.at(k, j);
            }
        }
    }
    return inv;
}

std::size_t QMatrix::rank() const
{
    QMatrix a = *this;
    std::size_t r = 0;
    for (std::size_t col = 0; col < cols_ && r < rows_; ++col) {
        std::size_t pivot = npos;
        for (std::size_t i = r; i < rows_; ++i)
            if (a.at(i, col) != 0) {
                pivot = i;
                break;
            }
        if (pivot == npos)
            continue;
        if (pivot != r)
            for (std::size_t j = 0; j < cols_; ++j)
                std::swap(a.at(r, j), a.at(pivot, j));
        Rat f = 1 / a.at(r, col);
        for (std::size_t i = r + 1; i < rows_; ++i) {
            if (a.at(i, col) == 0)
                continue;
            Rat g = a.at(i, col) * f;
            for (std::size_t j = col; j < cols_; ++j)
                a.at(i, j) -= g * a.at(r, j);
        }
        ++r;
    }
    return r;
}

Int QMatrix::denominator_lcm() const
{
    Int l(1);
    for (const Rat& q : e_)
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
    return l;
}

QLattice::QLattice(QMatrix basis)
    : basis_(std::move(basis)), inv_(0, 0), det_(0)
{
    if (basis_.rows() != basis_.cols())
        throw DimensionMismatch("lattice basis must be square");
    auto inv = basis_.inverse();
    if (!inv)
        throw ValidationError("lattice basis is singular");
    inv_ = *inv;
    det_ = basis_.det();
}

QLattice QLattice::standard(std::size_t n)
{
    return QLattice(QMatrix::identity(n));
}

QVec QLattice::coords(const QVec& v) const
{
    return inv_.mul(v);
}

bool QLattice::contains(const QVec& v) const
{
    for (const Rat& c : coords(v))
        if (c.get_den() != 1)
            return false;
    return true;
}

Int lattice_index(const QLattice& big, const QLattice& small)
{
    check_same_dim(big.dim(), small.dim(), "lattice index");
    for (std::size_t j = 0; j < small.dim(); ++j) {
        QVec col(small.dim());
        for (std::size_t i = 0; i < small.dim(); ++i)
            col[i] = small.basis().at(i, j);
        if (!big.contains(col))
            throw NotSublattice("basis vector " + std::to_string(j) + " not in the larger lattice");
    }
    Rat ratio = small.basis_det() / big.basis_det();
    Rat idx = abs(ratio);
    if (idx.get_den() != 1)
        throw NotSublattice("index is not an integer");
    return Int(idx.get_num());
}

long p_order_in_lattice(const QVec& w, const QLattice& lat, const Int& p)
{
    check_same_dim(w.size(), lat.dim(), "p-order");
    long m = 0;
    for (const Rat& c : lat.coords(w)) {
        if (c == 0)
            continue;
        long v = valuation(c, p);
        if (-v > m)
            m = -v;
    }
    return m;
}

PrimeLattices::PrimeLattices(QLattice default_lattice)
    : default_(std::move(default_lattice))
{
}

PrimeLattices PrimeLattices::standard(std::size_t n)
{
    return PrimeLattices(QLattice::standard(n));
}

void PrimeLattices::set_exception(const Int& p, QLattice lat)
{
    check_same_dim(lat.dim(), default_.dim(), "exception lattice");
    exceptions_.insert_or_assign(p, std::move(lat));
}

const QLattice& PrimeLattices::at(const Int& p) const
{
    auto it = exceptions_.find(p);
    return it == exceptions_.end() ? default_ : it->second;
}

std::vector<Int> order_candidate_primes(const QVec& w, const PrimeLattices& lats)
{
    check_same_dim(w.size(), lats.dim(), "candidate primes");
    Int den(1);
    for (const Rat& c : lats.default_lattice().coords(w))
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den().get_mpz_t());
    std::vector<Int> primes = den == 1 ? std::vector<Int>{} : distinct_prime_factors(den);
    for (const auto& [p, lat] : lats.exceptions())
        if (std::find(primes.begin(), primes.end(), p) == primes.end())
            primes.push_back(p);
    std::sort(primes.begin(), primes.end());
    return primes;
}

Int order_in_lattice(const QVec& w, const PrimeLattices& lats)
{
    Int n(1);
    for (const Int& p : order_candidate_primes(w, lats)) {
        long m = p_order_in_lattice(w, lats.at(p), p);
        if (m > 0)
            n *= ipow(p, static_cast<unsigned long>(m));
    }
    return n;
}

namespace {

// Extracts the nonzero columns of an integer matrix in column echelon form
// and rescales them by 1/scale into a square rational basis.
QLattice basis_from_echelon(const IntMatrix& h, std::size_t dim, const Int& scale)
{
    QMatrix b(dim, dim);
    std::size_t col = 0;
    for (std::size_t j = 0; j < h.cols() && col < dim; ++j) {
        bool nonzero = false;
        for (std::size_t i = 0; i < dim; ++i)
            if (h.at(i, j) != 0) {
                nonzero = true;
                break;
            }
        if (!nonzero)
            continue;
        for (std::size_t i = 0; i < dim; ++i) {
            Rat q(h.at(i, j), scale);
            q.canonicalize();
            b.at(i, col) = q;
        }
        ++col;
    }
    if (col != dim)
        throw ValidationError("lattice spanning set has deficient rank");
    return QLattice(b);
}

} // namespace

QLattice lattice_sum(const QLattice& a, const QLattice& b)
{
    check_same_dim(a.dim(), b.dim(), "lattice sum");
    std::size_t n = a.dim();
    Int s(1);
    mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), a.basis().denominator_lcm().get_mpz_t());
    mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), b.basis().denominator_lcm().get_mpz_t());
    IntMatrix joint(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat qa = a.basis().at(i, j) * s;
            Rat qb = b.basis().at(i, j) * s;
            joint.at(i, j) = Int(qa.get_num());
            joint.at(i, n + j) = Int(qb.get_num());
        }
    return basis_from_echelon(hnf(joint), n, s);
}

QLattice lattice_intersection(const QLattice& a, const QLattice& b)
{
    // (A ∩ B)* = A* + B* with dual basis (B^{-1})^T.
    auto dual = [](const QLattice& l) {
        return QLattice(l.basis_inverse().transpose());
    };
    return dual(lattice_sum(dual(a), dual(b)));
}

std::vector<QVec> sublattice_of_subspace(const std::vector<QVec>& span_basis, const QLattice& lat)
{
    if (span_basis.empty())
        return {};
    std::size_t n = lat.dim();
    std::size_t r = span_basis.size();
    QMatrix b = QMatrix::from_columns(span_basis);
    check_same_dim(b.rows(), n, "subspace ambient dimension");
    if (b.rank() != r)
        throw ValidationError("subspace generators are linearly dependent");

    // z in Z^n with G z in span(b)  <=>  (I - P) G z = 0 for the rational
    // projector P onto span(b).
    QMatrix bt = b.transpose();
    QMatrix gram = bt.mul(b);
    QMatrix gram_inv = *gram.inverse();
    QMatrix proj = b.mul(gram_inv).mul(bt);
    QMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.at(i, j) = (i == j ? Rat(1) : Rat(0)) - proj.at(i, j);
    QMatrix mg = m.mul(lat.basis());
    Int s = mg.denominator_lcm();
    IntMatrix mi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            Rat q = mg.at(i, j) * s;
            mi.at(i, j) = Int(q.get_num());
        }
    IntMatrix kern = integer_kernel(mi);
    if (kern.cols() != r)
        throw ValidationError("unexpected kernel rank in subspace-lattice intersection");
    std::vector<QVec> out;
    for (std::size_t c = 0; c < kern.cols(); ++c) {
        QVec z(n, Rat(0));
        for (std::size_t i = 0; i < n; ++i)
            z[i] = Rat(kern.at(i, c));
        out.push_back(lat.basis().mul(z));
    }
    return out;
}

QVec reduce_mod_lattice(const QVec& x, const QLattice& lat)
{
    QVec c = lat.coords(x);
    QVec frac(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        Int fl = floor_quot(Int(c[i].get_num()), Int(c[i].get_den()));
        frac[i] = c[i] - Rat(fl);
    }
    return lat.basis().mul(frac);
}

QVec add(const QVec& a, const QVec& b)
{
    check_same_dim(a.size(), b.size(), "vector sum");
    QVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] + b[i];
    return out;
}

QVec sub(const QVec& a, const QVec& b)
{
    check_same_dim(a.size(), b.size(), "vector difference");
    QVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

QVec scale(const Rat& c, const QVec& a)
{
    QVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = c * a[i];
    return out;
}

} // namespace testinv::exactalg
