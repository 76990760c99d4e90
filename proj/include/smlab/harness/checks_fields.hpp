#pragma once

#include <cmath>
#include <numbers>

#include "smlab/harness/checks_stochastic.hpp"

namespace smlab
{
namespace checks
{
//---------------------------------------------------------------------------//
// DETERMINISTIC FIELD CHECKS
//---------------------------------------------------------------------------//

inline CheckOutput schrodinger_ground_stationary(CheckContext const& ctx)
{
    detail::Recorder rec("schrodinger_ground_stationary",
                         "Schrodinger evolution keeps the ground-state density");
    double tol = ctx.tol(1e-3);
    auto g = standard_grid();
    auto ws0 = ground_state(g);
    double dt = 1e-3;
    std::size_t n = 1000;
    SchrodingerOptions opts;
    opts.store_every = n;
    auto ws = solve_schrodinger(harmonic_potential(g), ws0.psi[0], g, dt, n, opts);
    double l1 = l1_distance(g, ws.rho(ws.size() - 1), ws0.rho(0));
    Json in = grid_inputs(g);
    in["dt"] = dt;
    in["n_steps"] = n;
    rec.bound("l1_after_1000_steps", l1, tol, "analytic ground-state density", in);
    return rec.take();
}

inline CheckOutput drift_construction(CheckContext const& ctx)
{
    detail::Recorder rec("drift_construction",
                         "drifts b = v + u, b* = v - u from the Madelung data");
    double tol = ctx.tol(1e-8);
    auto g = standard_grid();
    auto ws = ground_state(g);
    for (double nu : {0.5, 1.0, 2.0})
    {
        auto df = drift_fields(ws, params_from_nu(nu));
        double gap = 0;
        // Interior of |x| < 4, away from the one-sided boundary rows.
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            double x = g.x(i);
            if (std::abs(x) >= 4)
                continue;
            auto k = static_cast<Eigen::Index>(i);
            gap = std::max(gap, std::abs(df.b[0][k] + 2 * nu * x));
            gap = std::max(gap, std::abs(df.b_star[0][k] - 2 * nu * x));
        }
        Json in = grid_inputs(g);
        in["nu"] = nu;
        in["window"] = "|x| < 4";
        rec.bound("ground_drift nu=" + format_double(nu), gap, tol, "b = -2 nu x, b* = 2 nu x", in);
    }
    return rec.take();
}

inline CheckOutput fokker_planck_stationary(CheckContext const& ctx)
{
    detail::Recorder rec("fokker_planck_stationary",
                         "Fokker-Planck with the ground drift keeps rho stationary");
    double tol = ctx.tol(1e-6);
    auto g = standard_grid();
    auto ws = ground_state(g);
    double dt = 1e-3;
    std::size_t n = 1000;
    for (double nu : {0.5, 2.0})
    {
        auto df = drift_fields(ws, params_from_nu(nu));
        FokkerPlanckOptions opts;
        opts.store_every = n;
        auto seq = evolve_density_fokker_planck(df, ws.rho(0), dt, n, opts);
        double l1 = l1_distance(g, seq.rho.back(), ws.rho(0));
        Json in = grid_inputs(g);
        in["nu"] = nu;
        in["dt"] = dt;
        in["n_steps"] = n;
        rec.bound("l1 nu=" + format_double(nu), l1, tol, "analytic ground-state density", in);
    }
    return rec.take();
}

inline CheckOutput sampler_determinism(CheckContext const& ctx)
{
    detail::Recorder rec("sampler_determinism",
                         "paths depend only on seed and global path index");
    auto proc = ground_process(1.0);
    std::size_t n_paths = 2000;
    std::size_t n_steps = 50;
    double dt = 1e-3;
    auto init = sample_initial(proc.grid, proc.ws.rho(0), n_paths, ctx.seed);
    auto run = [&](std::size_t workers) {
        SimulationOptions o;
        o.workers = workers;
        return simulate_ensemble(proc.df, init, proc.p, dt, n_steps, ctx.seed, o);
    };
    auto one = run(1);
    auto four = run(4);
    bool same_workers = one.positions == four.positions;

    std::size_t half = n_paths / 2;
    bool same_chunks = true;
    for (std::size_t offset : {std::size_t{0}, half})
    {
        auto part = sample_initial(proc.grid, proc.ws.rho(0), half, ctx.seed, offset);
        SimulationOptions o;
        o.path_offset = offset;
        auto e = simulate_ensemble(proc.df, part, proc.p, dt, n_steps, ctx.seed, o);
        same_chunks = same_chunks
                      && e.positions
                             == one.positions.middleRows(static_cast<Eigen::Index>(offset),
                                                         static_cast<Eigen::Index>(half));
    }
    Json in = sde_inputs(1.0, dt, n_steps, n_paths, ctx.seed);
    rec.custom("workers_1_vs_4", same_workers, true, 0.0, same_workers, "bitwise equality", in);
    rec.custom("two_chunks_vs_one_run", same_chunks, true, 0.0, same_chunks, "bitwise equality",
               in);
    return rec.take();
}

//---------------------------------------------------------------------------//
// FOKKER-PLANCK AGAINST SCHRODINGER
//---------------------------------------------------------------------------//

inline CheckOutput fokker_planck_schrodinger(CheckContext const& ctx)
{
    detail::Recorder rec("fokker_planck_schrodinger",
                         "Fokker-Planck under the drift fields transports rho = e^{2R}");
    double tol = ctx.tol(1e-3);
    double nu = 0.5;
    Grid1D g(-10, 10, 1001);
    double dt = 1e-3;
    auto n_steps = static_cast<std::size_t>(std::llround(2 * std::numbers::pi / dt));
    std::size_t frame_every = 500;
    OracleParams op;
    op.x0 = 1;
    auto psi0 = analytic_oracle(OracleKind::ho_coherent, op, g, {0.0}).psi[0];
    auto ws = solve_schrodinger(harmonic_potential(g), psi0, g, dt, n_steps);
    auto df = drift_fields(ws, params_from_nu(nu));
    FokkerPlanckOptions fo;
    fo.store_every = frame_every;
    auto seq = evolve_density_fokker_planck(df, ws.rho(0), dt, n_steps, fo);

    double worst = 0;
    double worst_t = 0;
    for (std::size_t k = 0; k < seq.size(); ++k)
    {
        auto step = static_cast<std::size_t>(std::llround(seq.times[k] / dt));
        RealField rho_s = (2.0 * ws.R[step].array()).exp().matrix();
        for (Eigen::Index i = 0; i < rho_s.size(); ++i)
        {
            if (!std::isfinite(rho_s[i]))
                rho_s[i] = 0;
        }
        double l1 = l1_distance(g, seq.rho[k], rho_s);
        if (l1 > worst)
        {
            worst = l1;
            worst_t = seq.times[k];
        }
        PlotTable frame{"density_movie_" + std::to_string(k),
                        {"t", "x", "rho_fokker_planck", "rho_schrodinger"},
                        {}};
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            auto j = static_cast<Eigen::Index>(i);
            frame.rows.push_back({seq.times[k], g.x(i), seq.rho[k][j], rho_s[j]});
        }
        rec.output().plots.push_back(std::move(frame));
    }
    Json in = grid_inputs(g);
    in["nu"] = nu;
    in["dt"] = dt;
    in["n_steps"] = n_steps;
    in["state"] = "ho_coherent x0=1";
    in["compared_every"] = frame_every;
    rec.bound("max_l1_over_period", worst, tol, "exp(2R) from the Crank-Nicolson solve", in)
        .detail = "worst at t=" + format_double(worst_t);
    return rec.take();
}

}  // namespace checks
}  // namespace smlab
