#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "smlab/fields/stencil.hpp"
#include "smlab/grid.hpp"

namespace smlab
{
//! Default relative density floor below which the phase is undefined.
inline constexpr double default_rho_floor = 1e-12;

//---------------------------------------------------------------------------//
/*!
 * Log-amplitude and phase of a wave function.
 *
 * <tt>psi = exp(R + iS)</tt> on the mask. \c R is finite wherever psi is
 * nonzero and \c -inf at exact zeros; \c S is NaN off the mask.
 */
struct Decomposition
{
    RealField R;
    RealField S;
    Mask mask;
};

//---------------------------------------------------------------------------//
/*!
 * Split psi into Madelung data.
 *
 * The mask is <tt>rho > rho_floor * max(rho)</tt>. On every connected masked
 * region the phase is unwrapped node to node by nearest-multiple-of-2pi
 * continuation, starting from the region's center node whose phase is kept
 * in (-pi, pi].
 */
inline Decomposition decompose(ComplexField const& psi,
                               double rho_floor = default_rho_floor)
{
    auto n = psi.size();
    if (n == 0)
        throw InvalidInput("decompose: empty field");
    if (!psi.allFinite())
        throw InvalidInput("decompose: psi has non-finite entries");

    RealField rho = psi.cwiseAbs2();
    double rho_max = rho.maxCoeff();
    double threshold = rho_floor * rho_max;

    Decomposition d;
    d.R = RealField(n);
    d.S = RealField::Constant(n, detail::nan());
    d.mask = Mask(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        d.R[i] = 0.5 * std::log(rho[i]);
        d.mask[static_cast<std::size_t>(i)] = rho[i] > threshold && rho[i] > 0;
    }

    auto pieces = regions(d.mask);
    if (pieces.empty())
        throw InvalidInput("decompose: every node is below the density floor");

    constexpr double two_pi = 2 * std::numbers::pi;
    for (auto r : pieces)
    {
        auto center = static_cast<Eigen::Index>(r.begin + (r.size() - 1) / 2);
        d.S[center] = std::arg(psi[center]);
        if (d.S[center] == -std::numbers::pi)
            d.S[center] = std::numbers::pi;
        auto continue_from = [&](Eigen::Index from, Eigen::Index to) {
            double raw = std::arg(psi[to]);
            double k = std::round((d.S[from] - raw) / two_pi);
            d.S[to] = raw + k * two_pi;
        };
        for (auto i = center + 1; i < static_cast<Eigen::Index>(r.end); ++i)
            continue_from(i - 1, i);
        for (auto i = center - 1; i >= static_cast<Eigen::Index>(r.begin); --i)
            continue_from(i + 1, i);
    }
    return d;
}

//! Density <tt>|psi|^2</tt>.
inline RealField density(ComplexField const& psi)
{
    return psi.cwiseAbs2();
}

//---------------------------------------------------------------------------//
/*!
 * Time-indexed wave function with its Madelung data.
 */
struct WaveSolution
{
    Grid1D grid;
    std::vector<double> times;
    std::vector<ComplexField> psi;
    std::vector<RealField> R;
    std::vector<RealField> S;
    std::vector<Mask> mask;
    double rho_floor{default_rho_floor};

    explicit WaveSolution(Grid1D g, double floor = default_rho_floor)
        : grid(g), rho_floor(floor)
    {
    }

    std::size_t size() const { return times.size(); }

    //! Append a snapshot, decomposing it.
    void push(double t, ComplexField value)
    {
        require_size(grid, value.size(), "WaveSolution");
        auto d = decompose(value, rho_floor);
        times.push_back(t);
        psi.push_back(std::move(value));
        R.push_back(std::move(d.R));
        S.push_back(std::move(d.S));
        mask.push_back(std::move(d.mask));
    }

    RealField rho(std::size_t k) const { return density(psi.at(k)); }

    //! Index of the stored time nearest to \c t.
    std::size_t nearest(double t) const
    {
        std::size_t best = 0;
        for (std::size_t k = 1; k < times.size(); ++k)
        {
            if (std::abs(times[k] - t) < std::abs(times[best] - t))
                best = k;
        }
        return best;
    }
};

}  // namespace smlab
