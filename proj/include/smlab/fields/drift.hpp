#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "smlab/fields/stencil.hpp"
#include "smlab/fields/wave.hpp"
#include "smlab/params.hpp"

namespace smlab
{
//! Bracketing snapshot pair and linear weight for a time instant.
struct TimeSlot
{
    std::size_t index{0};
    double weight{0};
};

inline TimeSlot locate_time(std::vector<double> const& times, double t)
{
    if (times.size() < 2 || t <= times.front())
        return {0, 0};
    if (t >= times.back())
        return {times.size() - 1, 0};
    auto it = std::upper_bound(times.begin(), times.end(), t);
    auto k = static_cast<std::size_t>(it - times.begin()) - 1;
    return {k, (t - times[k]) / (times[k + 1] - times[k])};
}

//---------------------------------------------------------------------------//
/*!
 * Forward and backward drift velocities on a grid, per stored time.
 *
 * Values between nodes and snapshots are reconstructed by linear
 * interpolation; positions outside the grid take the end values.
 */
struct DriftField
{
    Grid1D grid;
    std::vector<double> times;
    std::vector<RealField> b;
    std::vector<RealField> b_star;
    //! Nodes where the drift was computed rather than extended.
    std::vector<Mask> mask;
    DiffusionParams params;
    std::string label;
    double b_cap{1e3};

    explicit DriftField(Grid1D g) : grid(g) {}

    std::size_t size() const { return times.size(); }

    RealField forward_row(double t) const { return blend(b, t); }
    RealField backward_row(double t) const { return blend(b_star, t); }

    double forward(double x, double t) const
    {
        return interpolate_row(forward_row(t), x);
    }
    double backward(double x, double t) const
    {
        return interpolate_row(backward_row(t), x);
    }

    //! Linear interpolation of nodal values at position x.
    double interpolate_row(RealField const& row, double x) const
    {
        double u = (x - grid.x_min()) / grid.dx();
        auto last = static_cast<double>(grid.size() - 1);
        if (u <= 0)
            return row[0];
        if (u >= last)
            return row[row.size() - 1];
        auto i = static_cast<Eigen::Index>(u);
        double w = u - static_cast<double>(i);
        return (1 - w) * row[i] + w * row[i + 1];
    }

    double max_abs() const
    {
        double m = 0;
        for (auto const& row : b)
            m = std::max(m, row.cwiseAbs().maxCoeff());
        return m;
    }

  private:
    RealField blend(std::vector<RealField> const& rows, double t) const
    {
        auto slot = locate_time(times, t);
        if (slot.weight == 0)
            return rows[slot.index];
        return (1 - slot.weight) * rows[slot.index]
               + slot.weight * rows[slot.index + 1];
    }
};

struct DriftOptions
{
    double b_cap{1e3};
    std::string label{};
};

namespace detail
{
//! Fill unmasked nodes with the nearest masked value, then clamp.
inline void extend_and_clamp(RealField& f, Mask const& mask, double cap)
{
    auto n = f.size();
    Eigen::Index last_set = -1;
    std::vector<Eigen::Index> nearest_left(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if (mask[static_cast<std::size_t>(i)])
            last_set = i;
        nearest_left[static_cast<std::size_t>(i)] = last_set;
    }
    Eigen::Index next_set = -1;
    RealField out = f;
    for (Eigen::Index i = n - 1; i >= 0; --i)
    {
        if (mask[static_cast<std::size_t>(i)])
        {
            next_set = i;
            continue;
        }
        auto left = nearest_left[static_cast<std::size_t>(i)];
        Eigen::Index pick = left;
        if (pick < 0 || (next_set >= 0 && next_set - i < i - left))
            pick = next_set;
        out[i] = f[pick];
    }
    f = out.cwiseMax(-cap).cwiseMin(cap);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Drifts of the diffusion family from Madelung data.
 *
 * <tt>b = 2 nu dR/dx + (hbar/m) dS/dx</tt> and <tt>b* = b - 2 nu d(ln
 * rho)/dx</tt> on each masked region; off the mask both are extended from the
 * nearest masked node and then clamped to <tt>|b| <= b_cap</tt>.
 */
inline DriftField drift_fields(WaveSolution const& ws,
                               DiffusionParams const& p,
                               DriftOptions const& opts = {})
{
    if (!p.is_real())
    {
        throw UnsupportedConfiguration(
            "drift_fields: drifts are defined only for real diffusion constants");
    }
    if (ws.size() == 0)
        throw InvalidInput("drift_fields: empty wave solution");
    if (!(opts.b_cap > 0))
        throw InvalidInput("drift_fields: b_cap must be positive");

    double nu = p.nu_real();
    double current = p.hbar / p.mass;
    double dx = ws.grid.dx();

    DriftField df(ws.grid);
    df.times = ws.times;
    df.params = p;
    df.b_cap = opts.b_cap;
    df.label = opts.label;
    for (std::size_t k = 0; k < ws.size(); ++k)
    {
        Mask const& mask = ws.mask[k];
        RealField dR = derivative(ws.R[k], dx, mask);
        RealField dS = derivative(ws.S[k], dx, mask);
        RealField dlnrho = derivative(RealField(2.0 * ws.R[k]), dx, mask);
        RealField b = 2 * nu * dR + current * dS;
        RealField bs = b - 2 * nu * dlnrho;
        detail::extend_and_clamp(b, mask, opts.b_cap);
        detail::extend_and_clamp(bs, mask, opts.b_cap);
        df.b.push_back(std::move(b));
        df.b_star.push_back(std::move(bs));
        df.mask.push_back(mask);
    }
    return df;
}

//---------------------------------------------------------------------------//
/*!
 * Drift field from closed-form callables <tt>b(x, t)</tt> and <tt>b*(x, t)</tt>.
 */
template<class F, class G>
DriftField make_drift_field(Grid1D const& grid,
                            DiffusionParams const& p,
                            std::vector<double> times,
                            F&& forward,
                            G&& backward,
                            std::string label = {})
{
    if (times.empty())
        throw InvalidInput("make_drift_field: no times");
    DriftField df(grid);
    df.params = p;
    df.label = std::move(label);
    df.times = std::move(times);
    for (double t : df.times)
    {
        df.b.push_back(grid.sample([&](double x) { return double(forward(x, t)); }));
        df.b_star.push_back(
            grid.sample([&](double x) { return double(backward(x, t)); }));
        df.mask.push_back(full_mask(grid.size()));
    }
    return df;
}

//! Time-independent drift with <tt>b* = b</tt> unless given.
template<class F>
DriftField make_static_drift(Grid1D const& grid,
                             DiffusionParams const& p,
                             F&& forward,
                             std::string label = {})
{
    return make_drift_field(
        grid, p, {0.0}, [&](double x, double) { return forward(x); },
        [&](double x, double) { return forward(x); }, std::move(label));
}

}  // namespace smlab
