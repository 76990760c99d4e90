// Command-line front end: solve, sample, verify, correlate, report.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "smlab/harness.hpp"

using namespace smlab;

namespace
{
//! The only setting read from the environment.
constexpr char const* out_dir_env = "SMLAB_OUT_DIR";

std::string default_out_dir()
{
    if (char const* v = std::getenv(out_dir_env); v && *v)
        return v;
    return "smlab_out";
}

//! Flags shared by every subcommand; unset flags leave the config value alone.
struct Common
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<double> nu;
    std::vector<double> beta;
    std::vector<std::string> mode;
    std::optional<std::size_t> grid_n;
    std::optional<double> dt;
    std::optional<std::size_t> paths;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> workers;
    std::optional<std::string> oracle;
    std::optional<double> x0;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "Master seed");
    cmd->add_option("--nu", c.nu, "Real diffusion constant; repeat for several");
    cmd->add_option("--beta", c.beta, "Family label beta; repeat for several");
    cmd->add_option("--mode", c.mode, "continued-minus or continued-plus; repeat for several");
    cmd->add_option("--grid-n", c.grid_n, "Grid nodes")->check(CLI::Range(4, 1 << 20));
    cmd->add_option("--dt", c.dt, "Time step")->check(CLI::PositiveNumber);
    cmd->add_option("--paths", c.paths, "Sample paths")->check(CLI::PositiveNumber);
    cmd->add_option("--steps", c.steps, "Time steps");
    cmd->add_option("--workers", c.workers, "Sampler threads")->check(CLI::PositiveNumber);
    cmd->add_option("--oracle", c.oracle, "ho_ground, ho_coherent or free_gaussian");
    cmd->add_option("--x0", c.x0, "Coherent-state displacement");
    cmd->add_option("--out", c.out,
                    std::string("Output directory (default $") + out_dir_env + " or smlab_out)");
}

//! Config file (or defaults) with flags applied on top.
ExperimentConfig build_config(Common const& c)
{
    ExperimentConfig cfg;
    if (!c.config_path.empty())
        cfg = load_config(c.config_path);
    if (c.oracle)
    {
        try
        {
            cfg.state.oracle = oracle_from_string(*c.oracle);
        }
        catch (InvalidInput const& e)
        {
            throw ConfigError(std::string("--oracle: ") + e.what());
        }
    }
    if (c.x0)
        cfg.state.x0 = *c.x0;
    if (c.grid_n)
        cfg.grid.n = *c.grid_n;
    if (!c.nu.empty() || !c.beta.empty() || !c.mode.empty())
    {
        cfg.params.clear();
        for (double v : c.nu)
            cfg.params.push_back({ParamKind::nu, v, Mode::real});
        for (double v : c.beta)
            cfg.params.push_back({ParamKind::beta, v, Mode::real});
        for (auto const& m : c.mode)
        {
            try
            {
                cfg.params.push_back({ParamKind::nu, 0.5, mode_from_string(m)});
            }
            catch (Error const& e)
            {
                throw ConfigError(std::string("--mode: ") + e.what());
            }
        }
        for (auto const& p : cfg.params)
        {
            try
            {
                make_params(p, cfg.state);
            }
            catch (Error const& e)
            {
                throw ConfigError(std::string("--nu/--beta: ") + e.what());
            }
        }
    }
    if (c.seed || c.dt || c.paths || c.steps || c.workers)
    {
        if (!cfg.sde)
            cfg.sde = SdeSpec{};
        if (c.seed)
            cfg.sde->seed = *c.seed;
        if (c.dt)
            cfg.sde->dt = *c.dt;
        if (c.paths)
            cfg.sde->n_paths = *c.paths;
        if (c.steps)
            cfg.sde->n_steps = *c.steps;
        if (c.workers)
            cfg.sde->workers = *c.workers;
    }
    if (!c.out.empty())
        cfg.output_dir = c.out;
    else if (cfg.output_dir.empty())
        cfg.output_dir = default_out_dir();
    return cfg;
}

SdeSpec sde_or_default(ExperimentConfig const& cfg)
{
    SdeSpec s = cfg.sde.value_or(SdeSpec{});
    if (!s.seed)
        s.seed = 42;
    return s;
}

void print_summary(Report const& r, fs::path const& dir)
{
    for (auto const& rec : r.records)
    {
        std::cout << (rec.supplementary ? "  (supplementary) " : "  ") << to_string(rec.status)
                  << "  " << rec.check << " / " << rec.name;
        if (!rec.stage.empty())
            std::cout << "  [stage " << rec.stage << "]";
        if (rec.status != CheckStatus::pass && !rec.detail.empty())
            std::cout << "  (" << rec.detail << ")";
        std::cout << '\n';
    }
    std::cout << (r.passed() ? "PASS" : "FAIL") << ": " << r.count(CheckStatus::pass) << " pass, "
              << r.count(CheckStatus::fail) << " fail, " << r.count(CheckStatus::inconclusive)
              << " inconclusive; report in " << (dir / "report.json").string() << '\n';
}

void write_all(Report const& r, fs::path const& dir)
{
    ensure_directory(dir);
    write_report(dir / "report.json", r);
    emit_plots_data(r, dir);
}

//---------------------------------------------------------------------------//
// SUBCOMMANDS
//---------------------------------------------------------------------------//

int cmd_solve(Common const& c, std::size_t store_every, bool fokker_planck)
{
    auto cfg = build_config(c);
    auto sde = sde_or_default(cfg);
    cfg.sde = sde;
    Pipeline pl{make_grid(cfg.grid), {}, {}, {}, sde.dt, sde.n_steps};
    auto ws = detail::in_stage("solve", [&] {
        auto op = detail::oracle_params(cfg.state);
        auto times = uniform_times(sde.dt, sde.n_steps);
        if (cfg.state.solver == "oracle")
            return analytic_oracle(cfg.state.oracle, op, pl.grid, times);
        SchrodingerOptions so;
        so.units = {cfg.state.mass, cfg.state.hbar};
        so.store_every = store_every;
        return solve_schrodinger(detail::state_potential(cfg.state, pl.grid),
                                 analytic_oracle(cfg.state.oracle, op, pl.grid, {0.0}).psi[0],
                                 pl.grid, sde.dt, sde.n_steps, so);
    });
    fs::path dir = cfg.output_dir;
    ensure_directory(dir);
    // Thin oracle output to the requested stride.
    WaveSolution kept(ws.grid, ws.rho_floor);
    for (std::size_t k = 0; k < ws.size(); ++k)
    {
        if (cfg.state.solver != "oracle" || k % store_every == 0 || k + 1 == ws.size())
            kept.push(ws.times[k], ws.psi[k]);
    }
    auto files = write_wave_solution(dir, "psi", kept);
    std::cout << "wrote " << files.size() << " wave snapshots to " << dir.string() << '\n';
    if (fokker_planck)
    {
        for (auto const& spec : cfg.params)
        {
            auto p = make_params(spec, cfg.state);
            if (!p.is_real())
                continue;
            auto df = drift_fields(ws, p);
            FokkerPlanckOptions fo;
            fo.store_every = store_every;
            auto seq = evolve_density_fokker_planck(df, ws.rho(0), sde.dt, sde.n_steps, fo);
            auto stem = "rho_fp_" + detail::nu_label(p);
            write_density_sequence(dir, stem, seq);
            std::cout << "wrote " << seq.size() << " Fokker-Planck densities (" << stem << ")\n";
        }
    }
    return 0;
}

int cmd_sample(Common const& c, std::size_t bins, bool csv)
{
    auto cfg = build_config(c);
    cfg.sde = sde_or_default(cfg);
    cfg.checks.clear();
    auto pl = [&] {
        try
        {
            return run_pipeline(cfg);
        }
        catch (detail::StageError const& e)
        {
            throw Error("stage " + e.stage + ": " + e.what);
        }
    }();
    fs::path dir = cfg.output_dir;
    ensure_directory(dir);
    Binning b(pl.grid.x_min(), pl.grid.x_max(), bins);
    for (auto const& br : pl.branches)
    {
        if (!br.ensemble)
        {
            std::cout << "skipping " << detail::nu_label(br.params) << ": no sample paths in continued mode\n";
            continue;
        }
        auto stem = "ensemble_" + detail::nu_label(br.params);
        if (csv)
            write_ensemble_csv(dir / (stem + ".csv"), *br.ensemble);
        else
            write_ensemble_binary(dir, stem, *br.ensemble);
        auto d = density_histogram(*br.ensemble, pl.n_steps, b);
        write_density_csv(dir / ("density_" + detail::nu_label(br.params) + ".csv"), d);
        auto m = sample_moments(RealField(br.ensemble->at(pl.n_steps)));
        std::cout << detail::nu_label(br.params) << ": " << br.ensemble->n_paths
                  << " paths, final mean " << format_double(m.mean) << " +- "
                  << format_double(m.mean_se) << ", variance " << format_double(m.variance)
                  << " +- " << format_double(m.variance_se) << '\n';
    }
    return 0;
}

int cmd_verify(Common const& c, std::string const& level)
{
    CheckContext ctx;
    ctx.seed = c.seed.value_or(42);
    ctx.n_paths = c.paths;
    ctx.workers = c.workers.value_or(1);
    auto report = verify_suite(level == "fast" ? SuiteLevel::fast : SuiteLevel::full, ctx);
    fs::path dir = c.out.empty() ? default_out_dir() : c.out;
    write_all(report, dir);
    print_summary(report, dir);
    return report.passed() ? 0 : 1;
}

//! Two-time correlation curves per parameter set for a stationary state.
int cmd_correlate(Common const& c, double s_max, double s_step)
{
    auto cfg = build_config(c);
    auto sde = sde_or_default(cfg);
    auto g = make_grid(cfg.grid);
    auto op = detail::oracle_params(cfg.state);
    auto ws = analytic_oracle(cfg.state.oracle, op, g, {0.0});
    RealField V = detail::state_potential(cfg.state, g);
    auto n_lags = static_cast<std::size_t>(std::floor(s_max / s_step + 1e-9));
    auto lag_stride = static_cast<std::size_t>(std::llround(s_step / sde.dt));
    if (lag_stride == 0 || std::abs(lag_stride * sde.dt - s_step) > 1e-9 * s_step)
        throw ConfigError("--s-step must be a positive multiple of --dt");

    fs::path dir = cfg.output_dir;
    ensure_directory(dir);
    Report report;
    for (auto const& spec : cfg.params)
    {
        auto p = make_params(spec, cfg.state);
        auto space = p.is_real() ? build_space(g, SpaceKind::phase, normalized_phase(ws.S[0], p))
                                 : build_space(g, SpaceKind::lebesgue);
        auto h = hamiltonian(ws, p, V, space);
        auto x = position_operator(space);
        auto state = correlation_state(ws, 0, p);
        InteriorSpectrum spec_h(h, p);
        Complex kappa0 = p.is_real() ? detail::recursion_scale(p)
                                           * space.inner(state, ComplexField(h.m * state))
                                           / space.inner(state, state)
                                     : Complex(0);

        // Monte Carlo in real mode: stationary start, origins over the first half.
        std::vector<std::pair<double, double>> mc(n_lags + 1, {NAN, NAN});
        if (p.is_real() && sde.n_paths > 0)
        {
            std::size_t span = n_lags * lag_stride;
            std::size_t n_steps = 2 * span;
            auto df = drift_fields(ws, p);
            std::vector<std::size_t> origins;
            for (std::size_t j = 0; j <= span; j += lag_stride)
                origins.push_back(j);
            std::vector<RealField> per_path(n_lags + 1,
                                            RealField(static_cast<Eigen::Index>(sde.n_paths)));
            checks::simulate_in_chunks(
                df, ws.rho(0), p, sde.dt, n_steps, *sde.seed, sde.n_paths,
                RecordPlan::every(n_steps, lag_stride), sde.workers, [&](Ensemble const& e) {
                    for (std::size_t l = 0; l <= n_lags; ++l)
                    {
                        RealField acc = RealField::Zero(static_cast<Eigen::Index>(e.n_paths));
                        for (auto j : origins)
                            acc += e.at(j).cwiseProduct(e.at(j + l * lag_stride));
                        per_path[l].segment(static_cast<Eigen::Index>(e.path_offset),
                                            static_cast<Eigen::Index>(e.n_paths))
                            = acc / static_cast<double>(origins.size());
                    }
                });
            for (std::size_t l = 0; l <= n_lags; ++l)
            {
                auto m = sample_moments(per_path[l]);
                mc[l] = {m.mean, m.mean_se};
            }
        }

        PlotTable t{std::string(p.is_real() ? "correlation_real_" : "correlation_")
                        + detail::nu_label(p),
                    {"s", "mc_estimate", "mc_stderr", "matrix_element_re", "matrix_element_im"},
                    {}};
        for (std::size_t l = 0; l <= n_lags; ++l)
        {
            double s = static_cast<double>(l) * s_step;
            ComplexField v = x.m * state;
            if (p.is_real())
            {
                v = x.m * spec_h.propagate(v, s, kappa0);
            }
            else
            {
                // (psi, U(-s) X U(s) X psi) with U(s) = propagate(., -s).
                v = spec_h.propagate(ComplexField(x.m * spec_h.propagate(v, -s)), s);
            }
            Complex me = space.inner(state, v);
            t.rows.push_back({s, mc[l].first, mc[l].second, me.real(), me.imag()});
        }
        std::cout << "wrote " << (dir / (t.stem + ".csv")).string() << '\n';
        report.plots.push_back(std::move(t));
    }
    emit_plots_data(report, dir);
    return 0;
}

int cmd_report(Common const& c)
{
    auto cfg = build_config(c);
    auto report = run_experiment(cfg);
    print_summary(report, cfg.output_dir);
    return report.passed() ? 0 : 1;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic-mechanics lab: fields, sampler, operator algebra, checks"};
    app.require_subcommand(1);

    Common c;
    auto* solve = app.add_subcommand("solve", "Solve for psi(x, t) and write snapshots");
    add_common(solve, c);
    std::size_t store_every = 100;
    bool fp = false;
    solve->add_option("--store-every", store_every, "Keep every k-th step")->check(CLI::PositiveNumber);
    solve->add_flag("--fokker-planck", fp, "Also evolve rho by Fokker-Planck for each real nu");

    auto* sample = app.add_subcommand("sample", "Simulate sample paths and write them");
    add_common(sample, c);
    std::size_t bins = 80;
    bool csv = false;
    sample->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
    sample->add_flag("--csv", csv, "Write paths as CSV instead of binary");

    auto* verify = app.add_subcommand("verify", "Run the built-in check suite");
    add_common(verify, c);
    std::string level = "fast";
    verify->add_option("--level", level, "fast or full")->check(CLI::IsMember({"fast", "full"}));

    auto* correlate = app.add_subcommand("correlate", "Two-time correlation curves");
    add_common(correlate, c);
    double s_max = 1.0;
    double s_step = 0.025;
    correlate->add_option("--s-max", s_max, "Largest lag")->check(CLI::PositiveNumber);
    correlate->add_option("--s-step", s_step, "Lag spacing")->check(CLI::PositiveNumber);

    auto* report = app.add_subcommand("report", "Run a configured experiment and write its report");
    add_common(report, c);

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (*solve)
            return cmd_solve(c, store_every, fp);
        if (*sample)
            return cmd_sample(c, bins, csv);
        if (*verify)
            return cmd_verify(c, level);
        if (*correlate)
            return cmd_correlate(c, s_max, s_step);
        if (*report)
            return cmd_report(c);
    }
    catch (ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
