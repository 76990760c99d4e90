#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "smlab/fields/drift.hpp"
#include "smlab/sampler/density.hpp"
#include "smlab/sampler/ensemble.hpp"
#include "smlab/sampler/philox.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Draw initial positions from a nodal density.
 *
 * Inverse-CDF sampling of the trapezoid-interpolated density; path \c k uses
 * the initial-sampling stream of global path <tt>path_offset + k</tt>.
 */
inline RealField sample_initial(Grid1D const& grid,
                                RealField const& rho0,
                                std::size_t n_paths,
                                std::uint64_t seed,
                                std::size_t path_offset = 0)
{
    PiecewiseLinearDensity law(grid, rho0);
    if (std::abs(law.total() - 1) > 1e-6)
    {
        throw InvalidInput("sample_initial: density not normalized (mass "
                           + std::to_string(law.total()) + ")");
    }
    RealField x(static_cast<Eigen::Index>(n_paths));
    for (std::size_t k = 0; k < n_paths; ++k)
    {
        PathRandom rng(seed, path_offset + k, StreamPurpose::initial);
        x[static_cast<Eigen::Index>(k)] = law.inverse_cdf(rng.uniforms(0).first);
    }
    return x;
}

struct SimulationOptions
{
    //! Threads over paths; results do not depend on it.
    std::size_t workers{1};
    //! Steps to keep; empty keeps every step.
    RecordPlan record{};
    //! Global index of the first path, for chunked runs.
    std::size_t path_offset{0};
    double t0{0};
    std::string provenance{};
};

namespace detail
{
inline double reflect_into(double x, double lo, double hi)
{
    double width = hi - lo;
    for (int pass = 0; pass < 4 && (x < lo || x > hi); ++pass)
        x = x < lo ? 2 * lo - x : 2 * hi - x;
    if (x < lo || x > hi)
        x = lo + std::fmod(std::abs(x - lo), width);
    return x;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Euler-Maruyama ensemble of <tt>dx = b(x, t) dt + dW</tt>, <tt>E dW^2 = 2 nu
 * dt</tt>.
 *
 * The drift is interpolated linearly in space and time from the field and
 * paths reflect at the grid ends. Every increment is addressed by (seed,
 * global path, step), so the output is identical for any worker count or
 * chunking.
 */
inline Ensemble simulate_ensemble(DriftField const& df,
                                  RealField const& init,
                                  DiffusionParams const& p,
                                  double dt,
                                  std::size_t n_steps,
                                  std::uint64_t seed,
                                  SimulationOptions const& opts = {})
{
    double nu = p.nu_real();
    if (!(dt > 0))
        throw InvalidInput("simulate_ensemble: dt must be positive");
    Grid1D const& grid = df.grid;
    double const dx = grid.dx();
    double bmax = df.max_abs();
    if (!(bmax * dt < 10 * dx))
    {
        throw InvalidInput("simulate_ensemble: max|b| dt = " + std::to_string(bmax * dt)
                           + " exceeds 10 grid spacings; reduce dt");
    }
    double const lo = grid.x_min();
    double const hi = grid.x_max();
    for (Eigen::Index k = 0; k < init.size(); ++k)
    {
        if (!std::isfinite(init[k]) || init[k] < lo || init[k] > hi)
        {
            throw InvalidInput("simulate_ensemble: initial position of path "
                               + std::to_string(opts.path_offset + k)
                               + " outside the grid");
        }
    }

    RecordPlan plan = opts.record.empty() ? RecordPlan::all(n_steps) : opts.record;
    if (plan.back() > n_steps)
        throw InvalidInput("simulate_ensemble: record plan exceeds n_steps");

    Ensemble e;
    e.n_paths = static_cast<std::size_t>(init.size());
    e.n_steps = n_steps;
    e.path_offset = opts.path_offset;
    e.dt = dt;
    e.t0 = opts.t0;
    e.seed = seed;
    e.params = p;
    e.provenance = opts.provenance.empty() ? df.label : opts.provenance;
    e.x_min = lo;
    e.x_max = hi;
    e.steps = plan.steps();
    e.positions.resize(init.size(), static_cast<Eigen::Index>(e.steps.size()));

    std::vector<Eigen::Index> column_of(n_steps + 1, -1);
    for (std::size_t c = 0; c < e.steps.size(); ++c)
        column_of[e.steps[c]] = static_cast<Eigen::Index>(c);

    double const sigma = std::sqrt(2 * nu * dt);
    double const inv_dx = 1 / dx;
    auto const last_node = static_cast<Eigen::Index>(grid.size() - 1);

    auto run_range = [&](Eigen::Index begin, Eigen::Index end) {
        Eigen::Index count = end - begin;
        RealField x = init.segment(begin, count);
        std::vector<double> spare(static_cast<std::size_t>(count));
        for (std::size_t j = 0;; ++j)
        {
            if (column_of[j] >= 0)
                e.positions.col(column_of[j]).segment(begin, count) = x;
            if (j == n_steps)
                break;
            RealField const row = df.forward_row(opts.t0 + static_cast<double>(j) * dt);
            for (Eigen::Index k = 0; k < count; ++k)
            {
                auto path = opts.path_offset + static_cast<std::size_t>(begin + k);
                double noise;
                if (j % 2 == 0)
                {
                    auto [z0, z1] = PathRandom(seed, path, StreamPurpose::increments)
                                        .normals(j / 2);
                    noise = z0;
                    spare[static_cast<std::size_t>(k)] = z1;
                }
                else
                {
                    noise = spare[static_cast<std::size_t>(k)];
                }
                double xi = x[k];
                double u = (xi - lo) * inv_dx;
                double b;
                if (u <= 0)
                    b = row[0];
                else if (u >= static_cast<double>(last_node))
                    b = row[last_node];
                else
                {
                    auto i = static_cast<Eigen::Index>(u);
                    double w = u - static_cast<double>(i);
                    b = (1 - w) * row[i] + w * row[i + 1];
                }
                double next = xi + b * dt + sigma * noise;
                if (!std::isfinite(next))
                {
                    throw SimulationError("simulate_ensemble: non-finite position on path "
                                          + std::to_string(path) + " at step "
                                          + std::to_string(j + 1));
                }
                x[k] = (next < lo || next > hi) ? detail::reflect_into(next, lo, hi) : next;
            }
        }
    };

    auto n = init.size();
    auto workers = static_cast<Eigen::Index>(std::max<std::size_t>(1, opts.workers));
    workers = std::min(workers, std::max<Eigen::Index>(1, n));
    if (workers == 1)
    {
        run_range(0, n);
        return e;
    }
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        for (Eigen::Index w = 0; w < workers; ++w)
        {
            Eigen::Index begin = n * w / workers;
            Eigen::Index end = n * (w + 1) / workers;
            pool.emplace_back([&, w, begin, end] {
                try
                {
                    run_range(begin, end);
                }
                catch (...)
                {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    for (auto const& err : errors)
    {
        if (err)
            std::rethrow_exception(err);
    }
    return e;
}

}  // namespace smlab
