#pragma once

#include <optional>
#include <vector>

#include "smlab/harness/checks_fields.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * State of a configured run after each stage.
 *
 * One branch per parameter spec. Drifts and ensembles exist only for real
 * nu; continued parameters carry the solved state for algebra checks.
 */
struct Pipeline
{
    struct Branch
    {
        DiffusionParams params;
        std::optional<DriftField> drift;
        //! Positions at the final step only.
        std::optional<Ensemble> ensemble;
    };

    Grid1D grid;
    RealField potential;
    std::optional<WaveSolution> solution;
    std::vector<Branch> branches;
    double dt{0};
    std::size_t n_steps{0};
};

//---------------------------------------------------------------------------//
// CONFIG-DRIVEN CHECKS
//---------------------------------------------------------------------------//

/*!
 * Variance of the sampled final positions against the variance of the
 * solved density at the same time, for every real nu.
 *
 * The tolerance is a multiple of the standard error (default 3).
 */
inline CheckOutput stationary_variance_check(CheckContext const& ctx)
{
    if (!ctx.pipeline || !ctx.config)
        throw InvalidInput("stationary_variance: needs a configured pipeline");
    detail::Recorder rec("stationary_variance",
                         "sampled variance matches the density of the solved state");
    double k_se = ctx.tol(3.0);
    auto const& pl = *ctx.pipeline;
    auto const& ws = *pl.solution;
    double t_end = pl.dt * static_cast<double>(pl.n_steps);
    std::size_t k = ws.nearest(t_end);
    RealField rho = ws.rho(k);
    auto const& g = pl.grid;
    RealField x = g.sample([](double v) { return v; });
    double mass = trapezoid(g, rho);
    double mean = trapezoid(g, RealField(x.cwiseProduct(rho))) / mass;
    double ref = trapezoid(g, RealField((x.array() - mean).square().matrix().cwiseProduct(rho)))
                 / mass;

    for (auto const& b : pl.branches)
    {
        if (!b.ensemble)
            continue;
        std::string label = detail::nu_label(b.params);
        RealField final_x = b.ensemble->at(pl.n_steps);
        auto m = sample_moments(final_x);
        Json in{{"nu", detail::nu_json(b.params)},
                {"t", t_end},
                {"n_paths", b.ensemble->n_paths},
                {"seed", b.ensemble->seed}};
        auto& r = rec.near("variance " + label, m.variance, ref, k_se * m.variance_se,
                           "variance of the solved density at the final time", in);
        r.std_error = m.variance_se;
        r.inputs["n_samples"] = m.n;
        r.detail = "tolerance is " + format_double(k_se) + " standard errors";
        if (m.n < acceptance_occupancy)
        {
            r.status = CheckStatus::inconclusive;
            r.detail = "insufficient occupancy";
        }

        Binning bins(g.x_min(), g.x_max(), std::max<std::size_t>(10, (g.size() - 1) / 20));
        auto d = density_histogram(*b.ensemble, pl.n_steps, bins);
        PlotTable plot{"density_" + label, {"x", "mc_density", "mc_stderr", "reference"}, {}};
        for (std::size_t i = 0; i < bins.size(); ++i)
        {
            double c = bins.center(i);
            double u = (c - g.x_min()) / g.dx();
            auto j = std::min(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(g.size() - 2));
            double w = u - static_cast<double>(j);
            plot.rows.push_back({c, d.density[i], d.std_error[i], (1 - w) * rho[j] + w * rho[j + 1]});
        }
        rec.output().plots.push_back(std::move(plot));
    }
    if (rec.output().records.empty())
        throw UnsupportedConfiguration("stationary_variance: no real nu to sample");
    return rec.take();
}

}  // namespace smlab
