#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "smlab/harness/config.hpp"
#include "smlab/harness/registry.hpp"

namespace smlab
{
namespace detail
{
//! Error raised inside a named pipeline stage.
struct StageError
{
    std::string stage;
    std::string what;
};

template<class F>
auto in_stage(std::string const& stage, F&& f)
{
    try
    {
        return f();
    }
    catch (std::exception const& e)
    {
        throw StageError{stage, e.what()};
    }
}

inline RealField state_potential(StateSpec const& s, Grid1D const& g)
{
    if (s.oracle == OracleKind::free_gaussian)
        return RealField::Zero(static_cast<Eigen::Index>(g.size()));
    return harmonic_potential(g, s.mass, s.omega);
}

inline OracleParams oracle_params(StateSpec const& s)
{
    OracleParams op;
    op.mass = s.mass;
    op.hbar = s.hbar;
    op.omega = s.omega;
    op.x0 = s.x0;
    op.sigma0 = s.sigma0;
    return op;
}

inline bool needs_pipeline(ExperimentConfig const& cfg)
{
    for (auto const& r : cfg.checks)
    {
        auto const* spec = find_check(r.name);
        if (spec && spec->level == SuiteLevel::config)
            return true;
    }
    return false;
}

inline CheckRecord stage_failure(std::string const& check, std::string const& stage,
                                 std::string const& what)
{
    CheckRecord r;
    r.check = check;
    r.name = "error";
    r.anchor = check;
    r.oracle = "none";
    r.status = CheckStatus::fail;
    r.stage = stage;
    r.detail = what;
    return r;
}
}  // namespace detail

//---------------------------------------------------------------------------//
//! Reject unknown checks and sampling without a seed before any work.
inline void validate_config(ExperimentConfig const& cfg)
{
    for (std::size_t i = 0; i < cfg.checks.size(); ++i)
    {
        if (!find_check(cfg.checks[i].name))
        {
            std::string known;
            for (auto const& n : check_names())
                known += (known.empty() ? "" : ", ") + n;
            throw ConfigError("config field 'checks[" + std::to_string(i) + "]': unknown check '"
                              + cfg.checks[i].name + "' (known: " + known + ")");
        }
    }
    if (detail::needs_pipeline(cfg))
    {
        if (!cfg.sde)
            throw ConfigError("config field 'sde': required by the requested checks");
        if (!cfg.sde->seed)
            throw ConfigError("config field 'sde.seed': required whenever sampling is requested");
    }
}

/*!
 * Solve, build drifts and sample, in that order.
 *
 * Throws detail::StageError naming the stage that failed.
 */
inline Pipeline run_pipeline(ExperimentConfig const& cfg)
{
    Pipeline pl{make_grid(cfg.grid), {}, {}, {}, 0, 0};
    auto const& sde = *cfg.sde;
    pl.dt = sde.dt;
    pl.n_steps = sde.n_steps;
    pl.potential = detail::state_potential(cfg.state, pl.grid);
    double t_end = sde.dt * static_cast<double>(sde.n_steps);
    double field_dt = cfg.state.field_dt > 0 ? cfg.state.field_dt : sde.dt;
    auto n_fields = static_cast<std::size_t>(std::ceil(t_end / field_dt - 1e-9));

    pl.solution = detail::in_stage("solve", [&] {
        auto op = detail::oracle_params(cfg.state);
        if (cfg.state.solver == "oracle")
            return analytic_oracle(cfg.state.oracle, op, pl.grid, uniform_times(field_dt, n_fields));
        auto psi0 = analytic_oracle(cfg.state.oracle, op, pl.grid, {0.0}).psi[0];
        SchrodingerOptions so;
        so.units = {cfg.state.mass, cfg.state.hbar};
        return solve_schrodinger(pl.potential, psi0, pl.grid, field_dt, n_fields, so);
    });

    for (auto const& spec : cfg.params)
    {
        Pipeline::Branch b{make_params(spec, cfg.state), {}, {}};
        if (b.params.is_real())
        {
            b.drift = detail::in_stage("drift", [&] { return drift_fields(*pl.solution, b.params); });
            b.ensemble = detail::in_stage("sample", [&] {
                auto init = sample_initial(pl.grid, pl.solution->rho(0), sde.n_paths, *sde.seed);
                SimulationOptions so;
                so.workers = sde.workers;
                so.record = RecordPlan({0, sde.n_steps});
                so.provenance = "config " + digest(to_json(cfg));
                return simulate_ensemble(*b.drift, init, b.params, sde.dt, sde.n_steps, *sde.seed,
                                         so);
            });
        }
        pl.branches.push_back(std::move(b));
    }
    return pl;
}

//---------------------------------------------------------------------------//
// RUNNERS
//---------------------------------------------------------------------------//

namespace detail
{
inline void run_one(Report& report, CheckSpec const& spec, CheckContext const& ctx)
{
    try
    {
        auto out = spec.run(ctx);
        for (auto& r : out.records)
            report.add(std::move(r));
        for (auto& p : out.plots)
            report.plots.push_back(std::move(p));
    }
    catch (std::exception const& e)
    {
        report.add(stage_failure(spec.name, "check", e.what()));
    }
}

inline void write_outputs(Report const& report, fs::path const& dir)
{
    ensure_directory(dir);
    write_report(dir / "report.json", report);
    emit_plots_data(report, dir);
}
}  // namespace detail

/*!
 * Execute a validated configuration.
 *
 * Configuration errors throw ConfigError before anything runs. Errors in
 * later stages become failing records naming the stage. Outputs are
 * written when \c cfg.output_dir is set.
 */
inline Report run_experiment(ExperimentConfig const& cfg)
{
    validate_config(cfg);
    Report report;
    report.generated_at = utc_timestamp();
    report.config_digest = digest(to_json(cfg));
    report.environment = {{"version", smlab_version},
                          {"seed", cfg.sde && cfg.sde->seed ? Json(*cfg.sde->seed) : Json(nullptr)},
                          {"grid", to_json(make_grid(cfg.grid))},
                          {"dt", cfg.sde ? Json(cfg.sde->dt) : Json(nullptr)}};

    std::optional<Pipeline> pl;
    bool pipeline_failed = false;
    if (detail::needs_pipeline(cfg))
    {
        try
        {
            pl = run_pipeline(cfg);
        }
        catch (detail::StageError const& e)
        {
            pipeline_failed = true;
            for (auto const& r : cfg.checks)
            {
                if (find_check(r.name)->level == SuiteLevel::config)
                    report.add(detail::stage_failure(r.name, e.stage, e.what));
            }
        }
    }

    for (auto const& req : cfg.checks)
    {
        auto const& spec = *find_check(req.name);
        if (spec.level == SuiteLevel::config && pipeline_failed)
            continue;
        CheckContext ctx;
        if (cfg.sde)
        {
            ctx.seed = cfg.sde->seed.value_or(ctx.seed);
            ctx.n_paths = cfg.sde->n_paths;
            ctx.workers = cfg.sde->workers;
        }
        ctx.tolerance = req.tolerance;
        ctx.config = &cfg;
        ctx.pipeline = pl ? &*pl : nullptr;
        detail::run_one(report, spec, ctx);
    }
    if (!cfg.output_dir.empty())
        detail::write_outputs(report, cfg.output_dir);
    return report;
}

//! Built-in suite: fast runs the deterministic identities, full adds Monte Carlo.
inline Report verify_suite(SuiteLevel level, CheckContext const& ctx = {})
{
    if (level == SuiteLevel::config)
        throw InvalidInput("verify_suite: level must be fast or full");
    Report report;
    report.generated_at = utc_timestamp();
    Json suite{{"suite", level == SuiteLevel::fast ? "fast" : "full"},
               {"seed", ctx.seed},
               {"n_paths", ctx.n_paths ? Json(*ctx.n_paths) : Json(nullptr)}};
    report.config_digest = digest(suite);
    report.environment = {{"version", smlab_version},
                          {"seed", ctx.seed},
                          {"grid", to_json(checks::standard_grid())},
                          {"dt", "per check"}};
    for (auto const& spec : builtin_checks())
    {
        if (spec.level == SuiteLevel::config)
            continue;
        if (spec.level == SuiteLevel::full && level == SuiteLevel::fast)
            continue;
        detail::run_one(report, spec, ctx);
    }
    return report;
}

//! Checks tied to one acceptance criterion.
inline Report run_criterion(int criterion, CheckContext const& ctx = {})
{
    Report report;
    report.generated_at = utc_timestamp();
    report.config_digest = digest(Json{{"criterion", criterion}, {"seed", ctx.seed}});
    report.environment = {{"version", smlab_version},
                          {"seed", ctx.seed},
                          {"grid", to_json(checks::standard_grid())},
                          {"dt", "per check"}};
    bool any = false;
    for (auto const& spec : builtin_checks())
    {
        if (spec.criterion != criterion)
            continue;
        any = true;
        detail::run_one(report, spec, ctx);
    }
    if (!any)
        throw InvalidInput("run_criterion: no checks for criterion " + std::to_string(criterion));
    return report;
}

}  // namespace smlab
