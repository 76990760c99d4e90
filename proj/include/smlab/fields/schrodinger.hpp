#pragma once

#include <complex>
#include <string>

#include "smlab/fields/tridiagonal.hpp"
#include "smlab/fields/wave.hpp"

namespace smlab
{
//! Mass and Planck constant used by the wave-equation solvers.
struct Units
{
    double mass{1};
    double hbar{1};
};

struct SchrodingerOptions
{
    Units units{};
    //! Keep every k-th step (the initial state is always kept).
    std::size_t store_every{1};
    double rho_floor{default_rho_floor};
};

//---------------------------------------------------------------------------//
/*!
 * Crank-Nicolson propagation of psi under <tt>-hbar^2/2m d^2/dx^2 + V</tt>.
 *
 * Hard walls: psi vanishes at both grid ends. The Cayley form of the
 * trapezoidal step is unitary for the discrete interior norm, so the norm
 * changes only by rounding. With \c n_steps = 0 the input is returned
 * unchanged as the only snapshot.
 */
inline WaveSolution solve_schrodinger(RealField const& potential,
                                      ComplexField const& psi0,
                                      Grid1D const& grid,
                                      double dt,
                                      std::size_t n_steps,
                                      SchrodingerOptions const& opts = {})
{
    using C = std::complex<double>;
    require_size(grid, potential.size(), "solve_schrodinger: potential");
    require_size(grid, psi0.size(), "solve_schrodinger: psi0");
    if (!(dt > 0))
        throw InvalidInput("solve_schrodinger: dt must be positive");
    if (!potential.allFinite())
        throw InvalidInput("solve_schrodinger: potential must be finite");
    if (!psi0.allFinite())
        throw InvalidInput("solve_schrodinger: psi0 must be finite");
    double norm = trapezoid(grid, RealField(psi0.cwiseAbs2()));
    if (std::abs(norm - 1) > 1e-6)
    {
        throw InvalidInput("solve_schrodinger: psi0 not normalized (norm "
                           + std::to_string(norm) + ")");
    }
    if (opts.store_every == 0)
        throw InvalidInput("solve_schrodinger: store_every must be >= 1");

    WaveSolution ws(grid, opts.rho_floor);
    ws.push(0.0, psi0);
    if (n_steps == 0)
        return ws;

    auto const n = static_cast<Eigen::Index>(grid.size());
    auto const m = n - 2;
    double const hbar = opts.units.hbar;
    double const kinetic = hbar * hbar / (2 * opts.units.mass * grid.dx() * grid.dx());

    // H on interior nodes: diag = 2 kinetic + V, off-diagonal = -kinetic.
    C const half = C(0, dt / (2 * hbar));
    Tridiagonal<C> lhs(m);
    Tridiagonal<C> rhs_op(m);
    for (Eigen::Index i = 0; i < m; ++i)
    {
        double h_diag = 2 * kinetic + potential[i + 1];
        lhs.diag[i] = 1.0 + half * h_diag;
        rhs_op.diag[i] = 1.0 - half * h_diag;
        lhs.lower[i] = lhs.upper[i] = -half * kinetic;
        rhs_op.lower[i] = rhs_op.upper[i] = half * kinetic;
    }
    auto lu = TridiagonalLU<C>::factor(lhs);
    if (!lu)
    {
        throw NumericalBreakdown(
            "solve_schrodinger: singular Crank-Nicolson system at step 0");
    }

    ComplexField inner = psi0.segment(1, m);
    for (std::size_t step = 0; step < n_steps; ++step)
    {
        inner = lu->solve(rhs_op.apply(inner));
        if (!inner.allFinite())
        {
            throw NumericalBreakdown("solve_schrodinger: non-finite solution at step "
                                     + std::to_string(step));
        }
        bool last = step + 1 == n_steps;
        if ((step + 1) % opts.store_every == 0 || last)
        {
            ComplexField full = ComplexField::Zero(n);
            full.segment(1, m) = inner;
            ws.push(static_cast<double>(step + 1) * dt, std::move(full));
        }
    }
    return ws;
}

//! Potential sampled on the grid.
template<class F>
RealField sample_potential(Grid1D const& grid, F&& v)
{
    return grid.sample([&](double x) { return static_cast<double>(v(x)); });
}

//! <tt>m omega^2 x^2 / 2</tt>.
inline RealField harmonic_potential(Grid1D const& grid,
                                    double mass = 1,
                                    double omega = 1)
{
    return sample_potential(
        grid, [=](double x) { return 0.5 * mass * omega * omega * x * x; });
}

}  // namespace smlab
