#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "smlab/harness/report.hpp"
#include "smlab/sampler/estimators.hpp"

namespace smlab
{
struct ExperimentConfig;
struct Pipeline;

enum class SuiteLevel
{
    fast,    //!< Deterministic identities, seconds
    full,    //!< Monte Carlo criteria, minutes
    config,  //!< Driven by the experiment's own pipeline; not in the suite
};

//! Run-time settings shared by every check.
struct CheckContext
{
    std::uint64_t seed{42};
    //! Replaces the path count of statistical checks when set.
    std::optional<std::size_t> n_paths;
    std::size_t workers{1};
    //! Replaces the primary tolerance of the check when set.
    std::optional<double> tolerance;
    ExperimentConfig const* config{nullptr};
    Pipeline const* pipeline{nullptr};

    std::size_t paths(std::size_t fallback) const { return n_paths.value_or(fallback); }
    double tol(double fallback) const { return tolerance.value_or(fallback); }
};

struct CheckOutput
{
    std::vector<CheckRecord> records;
    std::vector<PlotTable> plots;
};

struct CheckSpec
{
    std::string name;
    std::string anchor;
    SuiteLevel level{SuiteLevel::fast};
    //! Acceptance criterion number, or 0.
    int criterion{0};
    std::function<CheckOutput(CheckContext const&)> run;
};

namespace detail
{
//! Record builder bound to one check.
class Recorder
{
  public:
    Recorder(std::string check, std::string anchor) : check_(std::move(check)), anchor_(std::move(anchor)) {}

    //! <tt>measured < tolerance</tt> with the residual as the measured value.
    CheckRecord& bound(std::string name, double residual, double tolerance, std::string oracle,
                       Json inputs = Json::object())
    {
        CheckRecord r = this->base(std::move(name), std::move(oracle), std::move(inputs));
        r.measured = residual;
        r.reference = 0.0;
        r.tolerance = tolerance;
        r.status = residual < tolerance ? CheckStatus::pass : CheckStatus::fail;
        return this->push(std::move(r));
    }

    //! <tt>|measured - reference| < tolerance</tt>.
    CheckRecord& near(std::string name, double measured, double reference, double tolerance,
                      std::string oracle, Json inputs = Json::object())
    {
        CheckRecord r = this->base(std::move(name), std::move(oracle), std::move(inputs));
        r.measured = measured;
        r.reference = reference;
        r.tolerance = tolerance;
        r.status = std::abs(measured - reference) < tolerance ? CheckStatus::pass
                                                              : CheckStatus::fail;
        return this->push(std::move(r));
    }

    /*!
     * Statistical comparison: inconclusive below the occupancy threshold or
     * when three standard errors exceed the tolerance.
     */
    CheckRecord& statistical(std::string name, double measured, double reference,
                             double tolerance, double se, std::size_t n_samples,
                             std::string oracle, Json inputs = Json::object())
    {
        CheckRecord& r = this->near(std::move(name), measured, reference, tolerance,
                                    std::move(oracle), std::move(inputs));
        r.std_error = se;
        r.inputs["n_samples"] = n_samples;
        if (n_samples < acceptance_occupancy)
        {
            r.status = CheckStatus::inconclusive;
            r.detail = "insufficient occupancy";
        }
        else if (!(3 * se < tolerance))
        {
            r.status = CheckStatus::inconclusive;
            r.detail = "statistical resolution coarser than tolerance";
        }
        return r;
    }

    //! Generic record; caller sets status.
    CheckRecord& custom(std::string name, Json measured, Json reference, double tolerance,
                        bool pass, std::string oracle, Json inputs = Json::object())
    {
        CheckRecord r = this->base(std::move(name), std::move(oracle), std::move(inputs));
        r.measured = std::move(measured);
        r.reference = std::move(reference);
        r.tolerance = tolerance;
        r.status = pass ? CheckStatus::pass : CheckStatus::fail;
        return this->push(std::move(r));
    }

    CheckOutput& output() { return out_; }

    CheckOutput take() { return std::move(out_); }

  private:
    std::string check_;
    std::string anchor_;
    CheckOutput out_;

    CheckRecord base(std::string name, std::string oracle, Json inputs) const
    {
        CheckRecord r;
        r.check = check_;
        r.name = std::move(name);
        r.anchor = anchor_;
        r.oracle = std::move(oracle);
        r.inputs = std::move(inputs);
        return r;
    }

    CheckRecord& push(CheckRecord r)
    {
        out_.records.push_back(std::move(r));
        return out_.records.back();
    }
};

//! Check-local random fields; seeded from the context so reports are reproducible.
inline ComplexField random_complex_field(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> dist;
    ComplexField f(static_cast<Eigen::Index>(n));
    for (auto& v : f)
        v = Complex(dist(rng), dist(rng));
    return f;
}

inline Json nu_json(DiffusionParams const& p)
{
    if (p.is_real())
        return p.nu.real();
    return {{"re", p.nu.real()}, {"im", p.nu.imag()}};
}

inline std::string nu_label(DiffusionParams const& p)
{
    if (p.is_real())
        return "nu=" + format_double(p.nu.real());
    return p.branch() < 0 ? "continued_minus" : "continued_plus";
}
}  // namespace detail

}  // namespace smlab
