#pragma once

#include <cmath>
#include <random>

#include "smlab/algebra.hpp"
#include "smlab/fields.hpp"
#include "smlab/harness/check.hpp"

namespace smlab
{
namespace checks
{
//---------------------------------------------------------------------------//
// SHARED SETUP
//---------------------------------------------------------------------------//

//! Standard desk-scale lattice: [-8, 8] with n nodes (801 gives dx = 0.02).
inline Grid1D standard_grid(std::size_t n = 801)
{
    return Grid1D(-8, 8, n);
}

inline WaveSolution ground_state(Grid1D const& g)
{
    return analytic_oracle(OracleKind::ho_ground, {}, g, {0.0});
}

inline DiffusionParams minus_branch()
{
    return continue_to_imaginary(params_from_nu(0.5), -1);
}

inline DiffusionParams plus_branch()
{
    return continue_to_imaginary(params_from_nu(0.5), +1);
}

inline Json grid_inputs(Grid1D const& g)
{
    return {{"grid", to_json(g)}};
}

//! Interior residual of <tt>c f - a f</tt> maximized over random fields.
template<class Expect>
double random_field_residual(OperatorMatrix const& c, std::mt19937_64& rng, std::size_t n_fields,
                             Expect&& expect)
{
    double worst = 0;
    for (std::size_t k = 0; k < n_fields; ++k)
    {
        auto f = detail::random_complex_field(rng, static_cast<std::size_t>(c.size()));
        worst = std::max(worst, max_interior_abs(ComplexField(c.apply(f) - expect(f))));
    }
    return worst;
}

//! Two-neighbour average <tt>(f_{i-1} + f_{i+1})/2</tt> on interior nodes.
inline ComplexField neighbour_average(ComplexField const& f)
{
    ComplexField out = ComplexField::Zero(f.size());
    for (Eigen::Index i = 1; i + 1 < f.size(); ++i)
        out[i] = 0.5 * (f[i - 1] + f[i + 1]);
    return out;
}

inline ComplexField smooth_probe(Grid1D const& g)
{
    return g.sample([](double x) { return Complex(std::exp(-0.5 * x * x), 0.3 * x * std::exp(-0.5 * x * x)); });
}

//---------------------------------------------------------------------------//
// VELOCITY-POSITION COMMUTATOR
//---------------------------------------------------------------------------//

inline CheckOutput commutator_velocity_position(CheckContext const& ctx)
{
    detail::Recorder rec("commutator_velocity_position", "velocity-position commutator [xdot, X] = 2 nu");
    double tol = ctx.tol(1e-12);
    std::mt19937_64 rng(ctx.seed);
    for (double nu : {0.5, 1.0, 2.0})
    {
        auto g = standard_grid();
        auto p = params_from_nu(nu);
        auto ws = ground_state(g);
        auto space = build_space(g, SpaceKind::density, ws.rho(0).cast<Complex>());
        auto c = commutator(velocity_operator(drift_fields(ws, p), p, space, 0),
                            position_operator(space));
        Json in = grid_inputs(g);
        in["nu"] = nu;
        in["n_fields"] = 20;
        in["seed"] = ctx.seed;
        double r = random_field_residual(c, rng, 20, [&](ComplexField const& f) {
            return ComplexField(2 * nu * f);
        });
        rec.bound("random_fields " + detail::nu_label(p), r, tol, "2 nu f pointwise", in)
            .detail = "the commutator of any matrix with a diagonal one has zero diagonal, so "
                      "the pointwise identity cannot hold for fields rough at the grid scale";

        double lattice = random_field_residual(c, rng, 20, [&](ComplexField const& f) {
            return ComplexField(2 * nu * neighbour_average(f));
        });
        auto& sup = rec.bound("lattice_form " + detail::nu_label(p), lattice, tol,
                              "2 nu times the two-neighbour average", in);
        sup.supplementary = true;

        // Smooth fields: second-order convergence of the pointwise form.
        std::vector<double> gaps;
        for (std::size_t n : {401, 801, 1601})
        {
            auto gg = standard_grid(n);
            auto wg = ground_state(gg);
            auto sg = build_space(gg, SpaceKind::density, wg.rho(0).cast<Complex>());
            auto cg = commutator(velocity_operator(drift_fields(wg, p), p, sg, 0),
                                 position_operator(sg));
            auto f = smooth_probe(gg);
            gaps.push_back(max_interior_abs(ComplexField(cg.apply(f) - 2 * nu * f)));
        }
        double ratio = gaps[1] / gaps[2];
        auto& conv = rec.custom("smooth_convergence " + detail::nu_label(p),
                                {{"gap_dx0.04", gaps[0]}, {"gap_dx0.02", gaps[1]},
                                 {"gap_dx0.01", gaps[2]}, {"halving_ratio", ratio}},
                                Json{{"halving_ratio_min", 3.5}}, 3.5, ratio >= 3.5,
                                "second-order convergence on a smooth field", {{"nu", nu}});
        conv.supplementary = true;
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// CONTINUED CANONICAL ALGEBRA
//---------------------------------------------------------------------------//

inline CheckOutput canonical_commutator(CheckContext const& ctx)
{
    detail::Recorder rec("canonical_commutator", "continued canonical algebra [X, P] = i hbar");
    double tol = ctx.tol(1e-12);
    std::mt19937_64 rng(ctx.seed + 1);
    auto g = standard_grid();
    auto p = minus_branch();
    auto space = build_space(g, SpaceKind::lebesgue);
    auto c = commutator(position_operator(space), momentum_operator(p, space));
    Complex ih(0, p.hbar);
    Json in = grid_inputs(g);
    in["branch"] = "minus";
    in["n_fields"] = 20;
    in["seed"] = ctx.seed;
    double r = random_field_residual(c, rng, 20, [&](ComplexField const& f) {
        return ComplexField(ih * f);
    });
    rec.bound("random_fields", r, tol, "i hbar f pointwise", in).detail =
        "zero diagonal of [X, P] on the lattice; see lattice_form";

    double lattice = random_field_residual(c, rng, 20, [&](ComplexField const& f) {
        return ComplexField(ih * neighbour_average(f));
    });
    rec.bound("lattice_form", lattice, tol, "i hbar times the two-neighbour average", in)
        .supplementary = true;

    auto f = smooth_probe(g);
    double smooth = max_interior_abs(ComplexField(c.apply(f) - ih * f));
    rec.bound("smooth_field", smooth, g.dx() * g.dx(), "i hbar f to O(dx^2)", in).supplementary = true;

    for (auto const& q : {minus_branch(), plus_branch()})
    {
        Complex coeff = q.rho_coefficient();
        rec.custom("density_coefficient " + detail::nu_label(q),
                   {{"re", coeff.real()}, {"im", coeff.imag()}}, 0.0, 0.0, coeff == Complex(0),
                   "exact zero of hbar^2/2m + 2 m nu^2", {{"nu", detail::nu_json(q)}});
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// T-MAP UNITARITY
//---------------------------------------------------------------------------//

inline CheckOutput gauge_map_unitarity(CheckContext const& ctx)
{
    detail::Recorder rec("gauge_map_unitarity", "T-map isometry (f, g)_H = (Tf, Tg)_I");
    double tol = ctx.tol(1e-10);
    std::mt19937_64 rng(ctx.seed + 2);
    auto g = standard_grid();
    OracleParams op;
    op.x0 = 1;
    auto coh = analytic_oracle(OracleKind::ho_coherent, op, g, {0.4});
    for (auto const& p : {params_from_nu(0.5), params_from_nu(1.0), params_from_nu(2.0),
                          minus_branch(), plus_branch()})
    {
        auto sn = normalized_phase(coh.S[0], p);
        auto h = build_space(g, SpaceKind::density, coh.rho(0).cast<Complex>());
        auto it = build_space(g, SpaceKind::phase, sn);
        double worst = 0;
        for (int k = 0; k < 100; ++k)
        {
            auto f = detail::random_complex_field(rng, g.size());
            auto q = detail::random_complex_field(rng, g.size());
            auto lhs = h.inner(f, q);
            auto rhs = it.inner(gauge_map_T(f, coh.R[0], sn), gauge_map_T(q, coh.R[0], sn));
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        Json in = grid_inputs(g);
        in["nu"] = detail::nu_json(p);
        in["state"] = "ho_coherent x0=1 t=0.4";
        in["n_pairs"] = 100;
        rec.bound("random_pairs " + detail::nu_label(p), worst, tol, "inner product in H_t", in);
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// RECURSION SEED
//---------------------------------------------------------------------------//

inline CheckOutput recursion_seed(CheckContext const& ctx)
{
    detail::Recorder rec("recursion_seed", "Hamiltonian recursion seed [H, X]/2m nu = 2 nu D");
    double tol = ctx.tol(1e-12);
    auto g = standard_grid();
    auto ws = ground_state(g);
    auto V = harmonic_potential(g);
    for (auto const& p : {params_from_nu(0.5), params_from_nu(1.0), params_from_nu(2.0),
                          minus_branch(), plus_branch()})
    {
        auto space = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto h = hamiltonian(ws, p, V, space);
        auto x1 = time_derivative_recursion(position_operator(space), h, p, 1).at(0);
        double r = max_interior_rows_abs(x1.m - mapped_velocity_operator(p, space).m);
        Json in = grid_inputs(g);
        in["nu"] = detail::nu_json(p);
        rec.bound("interior_rows " + detail::nu_label(p), r, tol, "mapped velocity 2 nu D", in)
            .detail = "kinetic sign follows direct substitution into the real-mode Hamiltonian";
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// ACCELERATION IDENTITY
//---------------------------------------------------------------------------//

inline double acceleration_gap(std::size_t n, double nu, AccelerationFields* keep = nullptr)
{
    auto g = standard_grid(n);
    auto a = acceleration_function(ground_state(g), params_from_nu(nu), harmonic_potential(g));
    double gap = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        if (a.valid[i])
        {
            auto k = static_cast<Eigen::Index>(i);
            gap = std::max(gap, std::abs(a.drift_form[k] - a.potential_form[k]));
        }
    }
    if (keep)
        *keep = std::move(a);
    return gap;
}

inline CheckOutput acceleration_identity(CheckContext const& ctx)
{
    detail::Recorder rec("acceleration_identity",
                         "acceleration from drift equals potential plus density term");
    double tol = ctx.tol(5e-3);
    for (double nu : {0.5, 1.0})
    {
        AccelerationFields fine_fields;
        double coarse = acceleration_gap(801, nu);
        double fine = acceleration_gap(1601, nu, &fine_fields);
        Json in{{"nu", nu}, {"state", "ho_ground"}, {"x_range", {-8, 8}}};
        in["dx"] = 0.02;
        rec.bound("mask_gap nu=" + format_double(nu), coarse, tol,
                  "drift form minus potential form", in)
            .detail = "max over the density mask shrunk by two nodes";
        double ratio = coarse / fine;
        in["dx_fine"] = 0.01;
        rec.custom("halving_ratio nu=" + format_double(nu),
                   {{"gap_dx0.02", coarse}, {"gap_dx0.01", fine}, {"ratio", ratio}},
                   Json{{"ratio_min", 3.5}}, 3.5, ratio >= 3.5, "second-order convergence", in);
    }
    // Closed-form spot value at nu = hbar/2m: acceleration(x) = x.
    auto g = standard_grid();
    auto a = acceleration_function(ground_state(g), params_from_nu(0.5), harmonic_potential(g));
    std::size_t at = 450;  // x = 1
    auto k = static_cast<Eigen::Index>(at);
    double x = g.x(at);
    rec.near("spot_drift_form x=1", a.drift_form[k], x, tol, "closed form acceleration = x",
             {{"nu", 0.5}, {"x", x}});
    rec.near("spot_potential_form x=1", a.potential_form[k], x, tol,
             "closed form acceleration = x", {{"nu", 0.5}, {"x", x}});
    return rec.take();
}

//---------------------------------------------------------------------------//
// HEISENBERG OPERATORS
//---------------------------------------------------------------------------//

inline CheckOutput heisenberg_operators(CheckContext const& ctx)
{
    detail::Recorder rec("heisenberg_operators",
                         "Taylor series of time derivatives equals Heisenberg conjugation");
    double tol_taylor = ctx.tol(1e-8);
    double tol_closed = 5e-3;
    auto g = standard_grid();
    auto p = minus_branch();
    auto space = build_space(g, SpaceKind::lebesgue);
    auto h = hamiltonian(ground_state(g), p, harmonic_potential(g), space);
    auto x = position_operator(space);
    auto P = momentum_operator(p, space);
    InteriorSpectrum spec(h, p);
    std::size_t k_basis = 8;
    auto basis = low_energy_basis(spec, static_cast<Eigen::Index>(k_basis));
    Json in = grid_inputs(g);
    in["potential"] = "x^2/2";
    in["basis"] = "lowest eigenvectors of the interior Hamiltonian";
    in["basis_size"] = k_basis;

    auto xs01 = spec.conjugate(x.m, 0.1);
    // Same operator on both sides: the spectrum is that of the hard-wall H.
    auto taylor = taylor_heisenberg(x, hard_wall(h), 0.1, 10, p);
    in["s"] = 0.1;
    in["order"] = 10;
    rec.bound("taylor_vs_conjugation s=0.1", subspace_gap(taylor.m, xs01, basis, g.dx()),
              tol_taylor, "exponential conjugation", in)
        .detail = "matrix elements between low-energy states";
    double raw = max_interior_rows_abs(taylor.m - xs01);
    auto& r = rec.bound("taylor_vs_conjugation_entrywise s=0.1", raw, tol_taylor,
                        "exponential conjugation", in);
    r.supplementary = true;
    r.detail = "entrywise over interior rows; the series is not convergent in s times the "
               "lattice bandwidth of H, which is large at this spacing";

    for (double s : {0.1, 1.0})
    {
        auto xs = heisenberg_operator(x, h, s, p);
        ComplexMatrix expect = std::cos(s) * x.m + std::sin(s) * P.m;
        in["s"] = s;
        in.erase("order");
        rec.bound("closed_form s=" + format_double(s), subspace_gap(xs.m, expect, basis, g.dx()),
                  tol_closed, "X cos s + P sin s", in);
    }
    return rec.take();
}

}  // namespace checks
}  // namespace smlab
