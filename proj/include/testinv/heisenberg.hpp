#pragma once

#include <cstddef>
#include <vector>

#include "testinv/exactalg.hpp"
#include "testinv/numutil.hpp"

namespace testinv::heis {

using exactalg::QVec;

/// Alternating form psi : V x V -> U, stored as one antisymmetric dim_v x
/// dim_v matrix of rationals per U-coordinate. The group law
/// (u',v')(u,v) = (u+u'+psi(v',v), v'+v) forces psi(v,v) = 0, so
/// non-alternating tensors are rejected at construction.
class PolarizationForm {
public:
    PolarizationForm(std::size_t dim_u, std::size_t dim_v, std::vector<Rat> tensor);
    static PolarizationForm zero(std::size_t dim_u, std::size_t dim_v);

    std::size_t dim_u() const { return du_; }
    std::size_t dim_v() const { return dv_; }
    std::size_t dim_w() const { return du_ + dv_; }

    const Rat& entry(std::size_t k, std::size_t i, std::size_t j) const
    {
        return t_[(k * dv_ + i) * dv_ + j];
    }

    /// psi(x, y) as a vector of length dim_u.
    QVec apply(const QVec& x, const QVec& y) const;

    bool operator==(const PolarizationForm&) const = default;

private:
    std::size_t du_, dv_;
    std::vector<Rat> t_;
};

/// An element w = (u, v) of W(Q).
struct HeisenbergElement {
    QVec u, v;

    bool operator==(const HeisenbergElement&) const = default;
};

HeisenbergElement heis_identity(const PolarizationForm& psi);

/// Concatenated (u | v) coordinates, and the inverse split.
QVec flatten(const HeisenbergElement& w);
HeisenbergElement unflatten(const QVec& x, const PolarizationForm& psi);

/// Group law: hmul(a, b) = (a.u + b.u + psi(a.v, b.v), a.v + b.v).
HeisenbergElement hmul(const HeisenbergElement& a, const HeisenbergElement& b,
                       const PolarizationForm& psi);

HeisenbergElement hinv(const HeisenbergElement& a, const PolarizationForm& psi);

/// n-th power; equals (n*u, n*v) since psi is alternating.
HeisenbergElement hpow(const HeisenbergElement& a, const Int& n, const PolarizationForm& psi);

} // namespace testinv::heis
