#pragma once

#include "testinv/invariants.hpp"

namespace testinv::testutil {

using namespace testinv::inv;

// G_m scaling on a one-dimensional U: the simplest split datum.
inline SubvarietyDatum split_scaling_datum(const Rat& w_u)
{
    SubvarietyDatum d{
        TorusSpec{{TorusFactor::split(1)}, std::nullopt},
        heis::PolarizationForm::zero(1, 0),
        heis::HeisenbergElement{{w_u}, {}},
        {},
        {}};
    ActionBlock b;
    b.in_u = true;
    b.coords = {0};
    b.chi.components.push_back(CharacterComponent{0, false, {1}, 0});
    d.action.push_back(b);
    return d;
}

// Res_{F/Q} G_m acting on a two-dimensional V through the norm.
inline SubvarietyDatum weil_norm_datum(long disc, const exactalg::QVec& w_v)
{
    SubvarietyDatum d{
        TorusSpec{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(disc))}, std::nullopt},
        heis::PolarizationForm::zero(0, 2),
        heis::HeisenbergElement{{}, w_v},
        {},
        {}};
    ActionBlock b;
    b.in_u = false;
    b.coords = {0, 1};
    b.chi.components.push_back(CharacterComponent{0, true, {}, 1});
    d.action.push_back(b);
    return d;
}

// Res_{Q(i)/Q} G_m on the V-plane plus a split G_m scaling a U-line.
inline SubvarietyDatum mixed_datum(const Rat& w_u, const exactalg::QVec& w_v)
{
    SubvarietyDatum d{
        TorusSpec{{TorusFactor::weil(fields::AbelianFieldSpec::quadratic(-4)),
                   TorusFactor::split(1)},
                  std::nullopt},
        heis::PolarizationForm::zero(1, 2),
        heis::HeisenbergElement{{w_u}, w_v},
        {},
        {}};
    ActionBlock bu;
    bu.in_u = true;
    bu.coords = {0};
    bu.chi.components.push_back(CharacterComponent{1, false, {1}, 0});
    d.action.push_back(bu);
    ActionBlock bv;
    bv.in_u = false;
    bv.coords = {0, 1};
    bv.chi.components.push_back(CharacterComponent{0, true, {}, 1});
    d.action.push_back(bv);
    return d;
}

} // namespace testinv::testutil
