#pragma once

#include <cmath>
#include <string>

#include "smlab/algebra/space.hpp"
#include "smlab/fields/drift.hpp"
#include "smlab/fields/stencil.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
// BASIC OPERATORS
//---------------------------------------------------------------------------//

inline OperatorMatrix position_operator(WeightedSpace const& space)
{
    ComplexField x = space.grid.nodes().cast<Complex>();
    auto op = multiplication_operator(space.grid, x, "X");
    op.kind = OperatorMatrix::Kind::position;
    return op;
}

/*!
 * Velocity operator <tt>b(x, t) + 2 nu d/dx</tt> on the density space.
 *
 * Real mode only; after continuation use mapped_velocity_operator.
 */
inline OperatorMatrix velocity_operator(DriftField const& df,
                                        DiffusionParams const& p,
                                        WeightedSpace const& space,
                                        double t)
{
    if (!p.is_real())
    {
        throw UnsupportedConfiguration(
            "velocity_operator: continued mode has no drift; use mapped_velocity_operator");
    }
    if (!(df.grid == space.grid))
        throw InvalidInput("velocity_operator: drift and space grids differ");
    auto d = derivative_matrix(space.grid);
    ComplexMatrix m = 2.0 * p.nu_real() * d.m;
    m.diagonal() += df.forward_row(t).cast<Complex>();
    return {m, "xdot", OperatorMatrix::Kind::general, true, space.grid.dx()};
}

//! <tt>2 nu d/dx</tt>: the velocity operator carried to the image space.
inline OperatorMatrix mapped_velocity_operator(DiffusionParams const& p,
                                               WeightedSpace const& space)
{
    auto d = derivative_matrix(space.grid);
    return d.scaled(2.0 * p.nu, "mapped_xdot");
}

//! <tt>P = m (2 nu d/dx)</tt>; equals <tt>-i hbar d/dx</tt> on the minus branch.
inline OperatorMatrix momentum_operator(DiffusionParams const& p, WeightedSpace const& space)
{
    auto d = derivative_matrix(space.grid);
    return d.scaled(2.0 * p.mass * p.nu, "P");
}

//---------------------------------------------------------------------------//
// PHASES AND THE T-MAP
//---------------------------------------------------------------------------//

/*!
 * Normalized phase <tt>S_N = S / z</tt>.
 *
 * Real in real mode, <tt>-+ i S</tt> after continuation. Off-mask nodes,
 * where S is undefined, get zero.
 */
inline ComplexField normalized_phase(RealField const& S, DiffusionParams const& p)
{
    ComplexField out(S.size());
    for (Eigen::Index i = 0; i < S.size(); ++i)
        out[i] = std::isfinite(S[i]) ? Complex(S[i]) / p.z : Complex(0);
    return out;
}

//! <tt>T f = exp(R + S_N) f</tt>.
inline ComplexField gauge_map_T(ComplexField const& f,
                                RealField const& R,
                                ComplexField const& S_N)
{
    if (f.size() != R.size() || f.size() != S_N.size())
        throw InvalidInput("gauge_map_T: size mismatch");
    ComplexField out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
        out[i] = std::exp(Complex(R[i]) + S_N[i]) * f[i];
    return out;
}

//! Continued-mode parameters on the given branch (sign < 0 is the minus branch).
inline DiffusionParams continue_to_imaginary(DiffusionParams const& p, int sign = -1)
{
    return diffusion_params(ParamKind::nu, 0, p.mass, p.hbar,
                            sign < 0 ? Mode::continued_minus : Mode::continued_plus);
}

/*!
 * State used in correlations at snapshot \c k.
 *
 * Real mode: <tt>T 1 = exp(R + S_N)</tt>. Continued mode: <tt>exp(R + i S)</tt>
 * on the minus branch and its conjugate on the plus branch.
 */
inline ComplexField correlation_state(WaveSolution const& ws,
                                      std::size_t k,
                                      DiffusionParams const& p)
{
    RealField const& R = ws.R.at(k);
    ComplexField out(R.size());
    ComplexField S_N = normalized_phase(ws.S.at(k), p);
    for (Eigen::Index i = 0; i < R.size(); ++i)
    {
        if (!std::isfinite(R[i]))
        {
            out[i] = 0;
            continue;
        }
        Complex phase = p.is_real() ? S_N[i] : Complex(0, -p.branch()) * p.z * S_N[i];
        out[i] = std::exp(Complex(R[i]) + phase);
    }
    return out;
}

//---------------------------------------------------------------------------//
// ACCELERATION
//---------------------------------------------------------------------------//

//! The two expressions for the acceleration field at one snapshot.
struct AccelerationFields
{
    //! <tt>db/dt + nu b'' + (b^2)'/2</tt> from the forward drift.
    RealField drift_form;
    //! <tt>-V'/m + (1/m) [(hbar^2/2m + 2 m nu^2) (sqrt rho)''/sqrt rho]'</tt>.
    RealField potential_form;
    //! Nodes where both are evaluated (mask shrunk past nested stencils).
    Mask valid;
    double coefficient{0};
};

/*!
 * Acceleration field in its drift and potential forms.
 *
 * The time derivative of b uses neighbouring snapshots when there are any
 * and is zero for a single snapshot. The density-term ratio uses the
 * same three-point stencil as the Hamiltonian.
 */
inline AccelerationFields acceleration_function(WaveSolution const& ws,
                                                DiffusionParams const& p,
                                                RealField const& potential,
                                                std::size_t k = 0)
{
    if (!p.is_real())
        throw UnsupportedConfiguration("acceleration_function: real mode only");
    require_size(ws.grid, potential.size(), "acceleration_function: potential");
    if (k >= ws.size())
        throw InvalidInput("acceleration_function: snapshot out of range");
    double nu = p.nu_real();
    double dx = ws.grid.dx();
    auto df = drift_fields(ws, p);

    Mask mask = ws.mask[k];
    RealField dbdt = RealField::Zero(potential.size());
    if (ws.size() > 1)
    {
        std::size_t lo = k == 0 ? 0 : k - 1;
        std::size_t hi = k + 1 == ws.size() ? k : k + 1;
        dbdt = (df.b[hi] - df.b[lo]) / (ws.times[hi] - ws.times[lo]);
        for (std::size_t i = 0; i < mask.size(); ++i)
            mask[i] = mask[i] && ws.mask[lo][i] && ws.mask[hi][i];
    }
    AccelerationFields out;
    out.valid = shrink_mask(mask, 2);
    bool any = std::any_of(out.valid.begin(), out.valid.end(), [](auto v) { return v != 0; });
    if (!any)
        throw InvalidInput("acceleration_function: mask too small to differentiate");

    RealField const& b = df.b[k];
    RealField b2 = b.array().square().matrix();
    out.drift_form = dbdt + nu * second_derivative(b, dx, mask)
                     + 0.5 * derivative(b2, dx, mask);

    out.coefficient = p.rho_coefficient().real();
    RealField ratio = laplacian_ratio(ws.R[k], dx, mask);
    RealField quantum = derivative(RealField(out.coefficient * ratio), dx, mask);
    out.potential_form = (-derivative(potential, dx, full_mask(ws.grid.size())) + quantum)
                         / p.mass;

    for (std::size_t i = 0; i < out.valid.size(); ++i)
    {
        if (!out.valid[i])
        {
            out.drift_form[static_cast<Eigen::Index>(i)] = detail::nan();
            out.potential_form[static_cast<Eigen::Index>(i)] = detail::nan();
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
// HAMILTONIAN
//---------------------------------------------------------------------------//

/*!
 * <tt>H = 2 m nu^2 Laplacian + V - (hbar^2/2m + 2 m nu^2) (sqrt rho)''/sqrt rho</tt>.
 *
 * The last term is multiplicative and uses the same stencil as the matrix
 * Laplacian, so that <tt>H exp(R) = -(hbar^2/2m) Laplacian exp(R) + V exp(R)</tt>
 * holds exactly on the lattice. After continuation its coefficient is zero
 * and H is <tt>-(hbar^2/2m) Laplacian + V</tt>.
 */
inline OperatorMatrix hamiltonian(WaveSolution const& ws,
                                  DiffusionParams const& p,
                                  RealField const& potential,
                                  WeightedSpace const& space,
                                  std::size_t k = 0)
{
    require_size(ws.grid, potential.size(), "hamiltonian: potential");
    if (!(ws.grid == space.grid))
        throw InvalidInput("hamiltonian: wave solution and space grids differ");
    if (k >= ws.size())
        throw InvalidInput("hamiltonian: snapshot out of range");
    Grid1D const& grid = ws.grid;
    auto lap = laplacian_matrix(grid);
    OperatorMatrix h;
    h.dx = grid.dx();
    h.label = p.is_real() ? "H" : "H_continued";
    h.m = (2.0 * p.mass * p.nu * p.nu) * lap.m;
    h.m.diagonal() += potential.cast<Complex>();

    Complex c = p.rho_coefficient();
    if (c != Complex(0))
    {
        RealField const& R = ws.R[k];
        for (Eigen::Index i = 0; i < R.size(); ++i)
        {
            if (!std::isfinite(R[i]))
            {
                throw InvalidInput("hamiltonian: density vanishes at node "
                                   + std::to_string(i)
                                   + "; the density term is undefined there");
            }
        }
        RealField ratio = laplacian_ratio(R, grid.dx(), full_mask(grid.size()));
        h.m.diagonal() -= c * ratio.cast<Complex>();
    }

    h.stationary = true;
    for (std::size_t j = 1; j < ws.size() && h.stationary; ++j)
    {
        for (std::size_t i = 0; i < grid.size(); ++i)
        {
            auto a = static_cast<Eigen::Index>(i);
            if (ws.mask[0][i] && std::abs(ws.R[j][a] - ws.R[0][a]) > 1e-12)
            {
                h.stationary = false;
                break;
            }
        }
    }
    return h;
}

}  // namespace smlab
