#pragma once

#include <cmath>
#include <numbers>

#include "smlab/harness/checks_algebra.hpp"
#include "smlab/sampler.hpp"

namespace smlab
{
namespace checks
{
//---------------------------------------------------------------------------//
// SHARED SETUP
//---------------------------------------------------------------------------//

inline constexpr std::size_t default_paths = 100000;

//! Paths per simulated block; bounds memory of fully recorded runs.
inline constexpr std::size_t chunk_paths = 20000;

/*!
 * Simulate \c n_paths in blocks of at most \c chunk_paths and hand each
 * block to \c consume. Blocks are keyed by global path index, so the
 * union is the ensemble a single call would produce.
 */
template<class F>
void simulate_in_chunks(DriftField const& df, RealField const& rho0, DiffusionParams const& p,
                        double dt, std::size_t n_steps, std::uint64_t seed, std::size_t n_paths,
                        RecordPlan const& record, std::size_t workers, F&& consume)
{
    for (std::size_t offset = 0; offset < n_paths; offset += chunk_paths)
    {
        std::size_t count = std::min(chunk_paths, n_paths - offset);
        auto init = sample_initial(df.grid, rho0, count, seed, offset);
        SimulationOptions opts;
        opts.workers = workers;
        opts.record = record;
        opts.path_offset = offset;
        consume(simulate_ensemble(df, init, p, dt, n_steps, seed, opts));
    }
}

//! Steps first..last inclusive.
inline std::vector<std::size_t> step_range(std::size_t first, std::size_t last)
{
    std::vector<std::size_t> s;
    for (std::size_t j = first; j <= last; ++j)
        s.push_back(j);
    return s;
}

//! Ground-state (Ornstein-Uhlenbeck) drift and stationary density.
struct GroundProcess
{
    Grid1D grid;
    WaveSolution ws;
    DriftField df;
    DiffusionParams p;
};

inline GroundProcess ground_process(double nu)
{
    auto g = standard_grid();
    auto ws = ground_state(g);
    auto p = params_from_nu(nu);
    auto df = drift_fields(ws, p);
    return {g, std::move(ws), std::move(df), p};
}

inline Json sde_inputs(double nu, double dt, std::size_t n_steps, std::size_t n_paths,
                       std::uint64_t seed)
{
    return {{"nu", nu}, {"dt", dt}, {"n_steps", n_steps}, {"n_paths", n_paths}, {"seed", seed}};
}

//---------------------------------------------------------------------------//
// DIFFUSION RECOVERY
//---------------------------------------------------------------------------//

inline CheckOutput quadratic_variation(CheckContext const& ctx)
{
    detail::Recorder rec("quadratic_variation", "quadratic variation of paths equals 2 nu");
    double tol = ctx.tol(0.02);
    double tol_rich = 0.005;
    double nu = 0.5;
    auto proc = ground_process(nu);
    std::size_t n_paths = ctx.paths(default_paths);
    double span = 0.1;
    std::vector<std::pair<double, double>> est;  // mean, se
    std::size_t samples = 0;
    for (double dt : {1e-3, 5e-4})
    {
        auto n_steps = static_cast<std::size_t>(std::llround(span / dt));
        ConditionalMomentTable total(Binning(-8, 8, 16));
        simulate_in_chunks(proc.df, proc.ws.rho(0), proc.p, dt, n_steps, ctx.seed, n_paths, {},
                           ctx.workers, [&](Ensemble const& e) {
                               total.merge(estimate_quadratic_variation(
                                   e, step_range(0, n_steps - 1), total.binning()));
                           });
        auto [m, se] = total.overall();
        est.emplace_back(m, se);
        samples = total.total_count();
        rec.statistical("qv dt=" + format_double(dt), m, 2 * nu, tol * 2 * nu, se,
                        total.total_count(), "2 nu", sde_inputs(nu, dt, n_steps, n_paths, ctx.seed));
    }
    double rich = 2 * est[1].first - est[0].first;
    double rich_se = std::hypot(2 * est[1].second, est[0].second);
    rec.statistical("qv richardson", rich, 2 * nu, tol_rich * 2 * nu, rich_se, samples,
                    "2 nu", {{"nu", nu}, {"dt_pair", {1e-3, 5e-4}}, {"n_paths", n_paths}});
    return rec.take();
}

//---------------------------------------------------------------------------//
// DRIFTS AND OSMOTIC VELOCITY
//---------------------------------------------------------------------------//

inline CheckOutput drift_osmotic(CheckContext const& ctx)
{
    detail::Recorder rec("drift_osmotic",
                         "forward/backward drifts and osmotic velocity nu d ln rho");
    double k_se = ctx.tol(3.0);
    double nu = 0.5;
    double dt = 1e-3;
    std::size_t n_steps = 100;
    auto proc = ground_process(nu);
    std::size_t n_paths = ctx.paths(default_paths);
    Binning bins(-1.5, 1.5, 12);
    auto inner = step_range(1, n_steps - 1);
    ConditionalMomentTable fwd(bins, acceptance_occupancy), bwd(bins, acceptance_occupancy);
    std::vector<std::size_t> hist(bins.size(), 0);
    std::size_t hist_n = 0;
    std::size_t mid = n_steps / 2;
    simulate_in_chunks(proc.df, proc.ws.rho(0), proc.p, dt, n_steps, ctx.seed, n_paths, {},
                       ctx.workers, [&](Ensemble const& e) {
                           fwd.merge(estimate_forward_drift(e, inner, bins, acceptance_occupancy));
                           bwd.merge(estimate_backward_drift(e, inner, bins, acceptance_occupancy));
                           auto d = density_histogram(e, mid, bins);
                           for (std::size_t i = 0; i < bins.size(); ++i)
                               hist[i] += d.count[i];
                           hist_n += d.n_samples;
                       });
    Json in = sde_inputs(nu, dt, n_steps, n_paths, ctx.seed);
    in["bins"] = {{"lo", bins.lo()}, {"hi", bins.hi()}, {"n", bins.size()}};
    in["min_occupancy"] = acceptance_occupancy;

    PlotTable plot{"drift_estimates",
                   {"x", "b_hat", "b_stderr", "b_field", "bstar_hat", "bstar_stderr", "bstar_field"},
                   {}};
    auto compare = [&](ConditionalMomentTable const& t, double sign, std::string const& name) {
        double worst = 0;
        std::size_t used = 0;
        for (std::size_t i = 0; i < t.size(); ++i)
        {
            if (!t.usable(i))
                continue;
            ++used;
            double ref = sign * 2 * nu * t.mean_position(i);
            worst = std::max(worst, std::abs(t.estimate(i) - ref) / t.std_error(i));
        }
        auto& r = rec.custom(name, {{"max_abs_z", worst}, {"bins_used", used}}, 0.0, k_se,
                             used > 0 && worst < k_se, "drift field from the ground state", in);
        if (used == 0)
        {
            r.status = CheckStatus::inconclusive;
            r.detail = "insufficient occupancy";
        }
    };
    compare(fwd, -1, "forward_drift");
    compare(bwd, +1, "backward_drift");
    for (std::size_t i = 0; i < bins.size(); ++i)
    {
        if (fwd.usable(i) && bwd.usable(i))
        {
            double x = fwd.mean_position(i);
            plot.rows.push_back({x, fwd.estimate(i), fwd.std_error(i), -2 * nu * x,
                                 bwd.estimate(i), bwd.std_error(i), 2 * nu * x});
        }
    }
    rec.output().plots.push_back(std::move(plot));

    // (b - b*)/2 against nu d ln rho from the histogram at the middle step.
    double w = bins.width();
    double worst = 0;
    std::size_t used = 0;
    auto n = static_cast<double>(hist_n);
    for (std::size_t i = 1; i + 1 < bins.size(); ++i)
    {
        if (!fwd.usable(i) || !bwd.usable(i) || hist[i - 1] < acceptance_occupancy
            || hist[i + 1] < acceptance_occupancy)
            continue;
        ++used;
        double lhs = 0.5 * (fwd.estimate(i) - bwd.estimate(i));
        double se_l = 0.5 * std::hypot(fwd.std_error(i), bwd.std_error(i));
        auto ln_se = [&](std::size_t k) {
            double q = static_cast<double>(hist[k]) / n;
            return std::sqrt((1 - q) / (q * n));
        };
        double rhs = nu * (std::log(static_cast<double>(hist[i + 1]))
                           - std::log(static_cast<double>(hist[i - 1])))
                     / (2 * w);
        double se_r = nu * std::hypot(ln_se(i + 1), ln_se(i - 1)) / (2 * w);
        worst = std::max(worst, std::abs(lhs - rhs) / std::hypot(se_l, se_r));
    }
    auto& r = rec.custom("osmotic_identity", {{"max_abs_z", worst}, {"bins_used", used}}, 0.0,
                         k_se, used > 0 && worst < k_se,
                         "nu d ln rho from the sampled histogram", in);
    if (used == 0)
    {
        r.status = CheckStatus::inconclusive;
        r.detail = "insufficient occupancy";
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// MEAN ACCELERATION
//---------------------------------------------------------------------------//

inline CheckOutput mean_acceleration(CheckContext const& ctx)
{
    detail::Recorder rec("mean_acceleration",
                         "symmetric mean acceleration equals -V'/m (Newton's law on average)");
    double tol = ctx.tol(0.05);
    double nu = 0.5;
    double dt = 5e-3;
    auto n_steps = static_cast<std::size_t>(std::llround(2 * std::numbers::pi / dt));
    std::size_t n_paths = ctx.paths(default_paths);
    auto g = standard_grid();
    OracleParams op;
    op.x0 = 1;
    auto ws = analytic_oracle(OracleKind::ho_coherent, op, g, uniform_times(dt, n_steps));
    auto p = params_from_nu(nu);
    auto df = drift_fields(ws, p);
    Binning bins(-2.5, 2.5, 20);
    ConditionalMomentTable table(bins, acceptance_occupancy);
    auto steps = step_range(1, n_steps - 1);
    simulate_in_chunks(df, ws.rho(0), p, dt, n_steps, ctx.seed, n_paths, {}, ctx.workers,
                       [&](Ensemble const& e) {
                           table.merge(estimate_mean_acceleration(e, df, steps, bins,
                                                                  acceptance_occupancy));
                       });
    Json in = sde_inputs(nu, dt, n_steps, n_paths, ctx.seed);
    in["state"] = "ho_coherent x0=1";
    in["bins"] = {{"lo", bins.lo()}, {"hi", bins.hi()}, {"n", bins.size()}};
    in["window"] = "0.5 <= |x| <= 2";

    PlotTable plot{"mean_acceleration", {"x", "estimate", "stderr", "reference"}, {}};
    double worst = 0;
    std::size_t used = 0;
    bool resolved = true;
    for (std::size_t i = 0; i < bins.size(); ++i)
    {
        if (!table.usable(i))
            continue;
        double x = table.mean_position(i);
        plot.rows.push_back({x, table.estimate(i), table.std_error(i), -x});
        if (std::abs(x) < 0.5 || std::abs(x) > 2)
            continue;
        ++used;
        worst = std::max(worst, std::abs(table.estimate(i) + x) / std::abs(x));
        resolved = resolved && 3 * table.std_error(i) < tol * std::abs(x);
    }
    rec.output().plots.push_back(std::move(plot));
    auto& r = rec.custom("binned_relative_error", {{"max_relative_error", worst}, {"bins_used", used}},
                         0.0, tol, used > 0 && worst < tol, "-x from the harmonic potential", in);
    if (used == 0 || (!resolved && worst >= tol))
    {
        r.status = CheckStatus::inconclusive;
        r.detail = used == 0 ? "insufficient occupancy" : "statistical resolution coarser than tolerance";
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// NU-INDEPENDENCE OF EQUAL-TIME STATISTICS
//---------------------------------------------------------------------------//

inline CheckOutput nu_independence(CheckContext const& ctx)
{
    detail::Recorder rec("nu_independence", "equal-time statistics do not depend on nu");
    double k_se = ctx.tol(3.0);
    double dt = 1e-3;
    std::size_t n_steps = 2000;
    std::size_t n_paths = ctx.paths(default_paths);
    std::vector<std::pair<double, SampleMoments>> found;
    for (double nu : {0.5, 1.0, 2.0})
    {
        auto proc = ground_process(nu);
        RealField final_x(static_cast<Eigen::Index>(n_paths));
        simulate_in_chunks(proc.df, proc.ws.rho(0), proc.p, dt, n_steps, ctx.seed, n_paths,
                           RecordPlan({n_steps}), ctx.workers, [&](Ensemble const& e) {
                               final_x.segment(static_cast<Eigen::Index>(e.path_offset),
                                               static_cast<Eigen::Index>(e.n_paths))
                                   = e.at(n_steps);
                           });
        auto m = sample_moments(final_x);
        found.emplace_back(nu, m);
        auto& r = rec.near("histogram_variance nu=" + format_double(nu), m.variance, 0.5,
                           k_se * m.variance_se, "hbar/2 m omega",
                           sde_inputs(nu, dt, n_steps, n_paths, ctx.seed));
        r.std_error = m.variance_se;
        r.inputs["n_samples"] = m.n;
        r.detail = "tolerance is " + format_double(k_se) + " standard errors";
        if (m.n < acceptance_occupancy)
        {
            r.status = CheckStatus::inconclusive;
            r.detail = "insufficient occupancy";
        }

        // Histogram against the stationary density, for plotting.
        Binning bins(-3, 3, 30);
        Ensemble tmp;
        tmp.n_paths = n_paths;
        tmp.n_steps = n_steps;
        tmp.steps = {n_steps};
        tmp.positions = final_x;
        auto d = density_histogram(tmp, n_steps, bins);
        PlotTable plot{"stationary_density_nu" + format_double(nu),
                       {"x", "mc_density", "mc_stderr", "reference"},
                       {}};
        for (std::size_t i = 0; i < bins.size(); ++i)
        {
            double x = bins.center(i);
            plot.rows.push_back({x, d.density[i], d.std_error[i],
                                 std::exp(-x * x) / std::sqrt(std::numbers::pi)});
        }
        rec.output().plots.push_back(std::move(plot));
    }
    // Pairwise consistency.
    double worst = 0;
    for (std::size_t a = 0; a < found.size(); ++a)
    {
        for (std::size_t b = a + 1; b < found.size(); ++b)
        {
            auto const& ma = found[a].second;
            auto const& mb = found[b].second;
            worst = std::max(worst, std::abs(ma.variance - mb.variance)
                                        / std::hypot(ma.variance_se, mb.variance_se));
        }
    }
    auto& pr = rec.custom("pairwise_consistency", {{"max_abs_z", worst}}, 0.0, k_se, worst < k_se,
                          "equal variances across nu", {{"nu", {0.5, 1.0, 2.0}}, {"n_paths", n_paths}});
    if (n_paths < acceptance_occupancy)
    {
        pr.status = CheckStatus::inconclusive;
        pr.detail = "insufficient occupancy";
    }

    // Operator side: (T1, X X T1) in every mode.
    auto g = standard_grid();
    auto ws = ground_state(g);
    double tol = g.dx() * g.dx();
    for (auto const& p : {params_from_nu(0.5), params_from_nu(1.0), params_from_nu(2.0),
                          minus_branch(), plus_branch()})
    {
        auto space = build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p));
        auto x = position_operator(space);
        auto v = correlation(correlation_state(ws, 0, p), {x, x}, space);
        Json in = grid_inputs(g);
        in["nu"] = detail::nu_json(p);
        auto& r = rec.near("equal_time_correlation " + detail::nu_label(p), v.real(), 0.5, tol,
                           "hbar/2 m omega", in);
        r.measured = {{"re", v.real()}, {"im", v.imag()}};
        if (!(std::abs(v.imag()) < tol))
            r.status = CheckStatus::fail;
        r.detail = "tolerance dx^2";
    }
    return rec.take();
}

//---------------------------------------------------------------------------//
// TWO-TIME CORRELATIONS
//---------------------------------------------------------------------------//

inline CheckOutput feynman_kac(CheckContext const& ctx)
{
    detail::Recorder rec("feynman_kac",
                         "two-time path correlation equals the operator matrix element");
    double tol = ctx.tol(0.02);
    double tol_cont = 5e-3;
    double nu = 0.5;
    double dt = 1e-3;
    std::size_t stride = 25;
    // Origins pooled over [0, 4]; the stationary average narrows the error bars.
    std::size_t n_steps = 5000;
    std::size_t last_origin = 4000;
    std::size_t n_paths = ctx.paths(default_paths);
    auto proc = ground_process(nu);

    // Monte Carlo on pooled origins; each chunk's per-path means are merged.
    std::vector<std::size_t> origins;
    for (std::size_t j = 0; j <= last_origin; j += stride)
        origins.push_back(j);
    std::vector<std::size_t> lags;
    for (std::size_t l = 0; l <= 1000; l += stride)
        lags.push_back(l);
    std::vector<RealField> per_path(lags.size(), RealField(static_cast<Eigen::Index>(n_paths)));
    simulate_in_chunks(proc.df, proc.ws.rho(0), proc.p, dt, n_steps, ctx.seed, n_paths,
                       RecordPlan::every(n_steps, stride), ctx.workers, [&](Ensemble const& e) {
                           for (std::size_t li = 0; li < lags.size(); ++li)
                           {
                               RealField acc = RealField::Zero(static_cast<Eigen::Index>(e.n_paths));
                               for (auto j : origins)
                                   acc += e.at(j).cwiseProduct(e.at(j + lags[li]));
                               per_path[li].segment(static_cast<Eigen::Index>(e.path_offset),
                                                    static_cast<Eigen::Index>(e.n_paths))
                                   = acc / static_cast<double>(origins.size());
                           }
                       });

    auto g = proc.grid;
    auto V = harmonic_potential(g);
    auto space = build_space(g, SpaceKind::phase, normalized_phase(proc.ws.S[0], proc.p));
    auto h = hamiltonian(proc.ws, proc.p, V, space);
    auto x = position_operator(space);
    auto t1 = correlation_state(proc.ws, 0, proc.p);

    auto pc = minus_branch();
    auto l2 = build_space(g, SpaceKind::lebesgue);
    auto hc = hamiltonian(proc.ws, pc, V, l2);
    auto xc = position_operator(l2);
    auto psi = correlation_state(proc.ws, 0, pc);
    InteriorSpectrum spec_c(hc, pc);
    InteriorSpectrum spec_r(h, proc.p);
    Complex kappa0 = detail::recursion_scale(proc.p) * space.inner(t1, ComplexField(h.m * t1))
                     / space.inner(t1, t1);

    PlotTable real_curve{"correlation_real_nu",
                         {"s", "mc_estimate", "mc_stderr", "matrix_element_re", "matrix_element_im"},
                         {}};
    PlotTable cont_curve{"correlation_continued",
                         {"s", "mc_estimate", "mc_stderr", "matrix_element_re", "matrix_element_im"},
                         {}};
    for (std::size_t li = 0; li < lags.size(); ++li)
    {
        double s = static_cast<double>(lags[li]) * dt;
        auto m = sample_moments(per_path[li]);
        // Same as semigroup_correlation, with the spectrum shared across lags.
        Complex me = space.inner(t1, ComplexField(x.m * spec_r.propagate(ComplexField(x.m * t1), s, kappa0)));
        // Continued mode by vector propagation: (psi, U(-s) X U(s) X psi).
        ComplexField v = spec_c.propagate(ComplexField(xc.m * psi), -s);
        v = spec_c.propagate(ComplexField(xc.m * v), s);
        Complex mc = l2.inner(psi, v);
        real_curve.rows.push_back({s, m.mean, m.mean_se, me.real(), me.imag()});
        cont_curve.rows.push_back({s, m.mean, m.mean_se, mc.real(), mc.imag()});

        if (lags[li] != 250 && lags[li] != 500 && lags[li] != 1000)
            continue;
        Json in = sde_inputs(nu, dt, n_steps, n_paths, ctx.seed);
        in["s"] = s;
        in["origins"] = {{"first", 0}, {"last", last_origin * dt}, {"spacing", stride * dt}};
        in["grid"] = to_json(g);
        double rel = std::abs(m.mean - me.real()) / std::abs(me.real());
        auto& r = rec.statistical("mc_vs_semigroup s=" + format_double(s), m.mean, me.real(),
                                  tol * std::abs(me.real()), m.mean_se, m.n,
                                  "semigroup matrix element (e^R, X e^{s(K-k0)} X e^R)", in);
        r.measured = {{"mc", m.mean}, {"relative_gap", rel}};
        r.detail = "relative tolerance " + format_double(tol);

        auto xs = heisenberg_operator(xc, hc, s, pc);
        Complex q = correlation(psi, {xc, xs}, l2);
        Complex exact = 0.5 * std::exp(Complex(0, -s));
        Json inc = grid_inputs(g);
        inc["s"] = s;
        inc["branch"] = "minus";
        rec.custom("continued_ground s=" + format_double(s), {{"re", q.real()}, {"im", q.imag()}},
                   {{"re", exact.real()}, {"im", exact.imag()}}, tol_cont,
                   std::abs(q - exact) < tol_cont, "0.5 exp(-i s) from ladder operators", inc)
            .measured["abs_gap"] = std::abs(q - exact);
    }
    rec.output().plots.push_back(std::move(real_curve));
    rec.output().plots.push_back(std::move(cont_curve));
    return rec.take();
}

}  // namespace checks
}  // namespace smlab
