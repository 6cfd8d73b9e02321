#include "testinv/heisenberg.hpp"

#include "testinv/errors.hpp"

namespace testinv::heis {

namespace {

void check_element(const HeisenbergElement& a, const PolarizationForm& psi)
{
    if (a.u.size() != psi.dim_u() || a.v.size() != psi.dim_v())
        throw DimensionMismatch("element does not match the ambient form");
}

} // namespace

PolarizationForm::PolarizationForm(std::size_t dim_u, std::size_t dim_v, std::vector<Rat> tensor)
    : du_(dim_u), dv_(dim_v), t_(std::move(tensor))
{
    if (t_.size() != du_ * dv_ * dv_)
        throw DimensionMismatch("polarization tensor has wrong size");
    for (std::size_t k = 0; k < du_; ++k)
        for (std::size_t i = 0; i < dv_; ++i)
            for (std::size_t j = i; j < dv_; ++j)
                if (entry(k, i, j) != -entry(k, j, i))
                    throw NotAlternating("psi component " + std::to_string(k) + " is not antisymmetric");
}

PolarizationForm PolarizationForm::zero(std::size_t dim_u, std::size_t dim_v)
{
    return PolarizationForm(dim_u, dim_v, std::vector<Rat>(dim_u * dim_v * dim_v, Rat(0)));
}

QVec PolarizationForm::apply(const QVec& x, const QVec& y) const
{
    if (x.size() != dv_ || y.size() != dv_)
        throw DimensionMismatch("psi arguments must have length dim_v");
    QVec out(du_, Rat(0));
    for (std::size_t k = 0; k < du_; ++k)
        for (std::size_t i = 0; i < dv_; ++i) {
            if (x[i] == 0)
                continue;
            for (std::size_t j = 0; j < dv_; ++j) {
                const Rat& t = entry(k, i, j);
                if (t != 0 && y[j] != 0)
                    out[k] += t * x[i] * y[j];
            }
        }
    return out;
}

HeisenbergElement heis_identity(const PolarizationForm& psi)
{
    return HeisenbergElement{QVec(psi.dim_u(), Rat(0)), QVec(psi.dim_v(), Rat(0))};
}

QVec flatten(const HeisenbergElement& w)
{
    QVec out = w.u;
    out.insert(out.end(), w.v.begin(), w.v.end());
    return out;
}

HeisenbergElement unflatten(const QVec& x, const PolarizationForm& psi)
{
    if (x.size() != psi.dim_w())
        throw DimensionMismatch("flat vector does not match dim W");
    HeisenbergElement w;
    w.u.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(psi.dim_u()));
    w.v.assign(x.begin() + static_cast<std::ptrdiff_t>(psi.dim_u()), x.end());
    return w;
}

HeisenbergElement hmul(const HeisenbergElement& a, const HeisenbergElement& b,
                       const PolarizationForm& psi)
{
    check_element(a, psi);
    check_element(b, psi);
    HeisenbergElement out;
    out.u = exactalg::add(exactalg::add(a.u, b.u), psi.apply(a.v, b.v));
    out.v = exactalg::add(a.v, b.v);
    return out;
}

HeisenbergElement hinv(const HeisenbergElement& a, const PolarizationForm& psi)
{
    check_element(a, psi);
    HeisenbergElement out;
    out.u = exactalg::scale(Rat(-1), a.u);
    out.v = exactalg::scale(Rat(-1), a.v);
    return out;
}

HeisenbergElement hpow(const HeisenbergElement& a, const Int& n, const PolarizationForm& psi)
{
    check_element(a, psi);
    Rat f(n);
    HeisenbergElement out;
    out.u = exactalg::scale(f, a.u);
    out.v = exactalg::scale(f, a.v);
    return out;
}

} // namespace testinv::heis
