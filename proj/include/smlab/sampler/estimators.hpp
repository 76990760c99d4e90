#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "smlab/fields/drift.hpp"
#include "smlab/io.hpp"
#include "smlab/sampler/density.hpp"
#include "smlab/sampler/ensemble.hpp"

namespace smlab
{
//! Occupancy below which a bin is unusable.
inline constexpr std::size_t default_min_occupancy = 50;
//! Occupancy required for acceptance-grade assertions.
inline constexpr std::size_t acceptance_occupancy = 500;

//---------------------------------------------------------------------------//
/*!
 * Uniform bins over [lo, hi).
 */
class Binning
{
  public:
    Binning(double lo, double hi, std::size_t n) : lo_(lo), hi_(hi), n_(n)
    {
        if (!(hi > lo) || n == 0)
            throw InvalidInput("Binning: require hi > lo and n > 0");
        width_ = (hi - lo) / static_cast<double>(n);
    }

    //! Bins whose edges are grid nodes, \c nodes_per_bin spacings wide.
    static Binning aligned(Grid1D const& grid, std::size_t nodes_per_bin = 1)
    {
        if (nodes_per_bin == 0)
            throw InvalidInput("Binning: nodes_per_bin must be positive");
        std::size_t cells = grid.size() - 1;
        std::size_t n = cells / nodes_per_bin;
        double hi = grid.x(n * nodes_per_bin);
        return Binning(grid.x_min(), hi, n);
    }

    //! Bins of width close to \c width centered on the origin's lattice.
    static Binning centered(double lo, double hi, double width)
    {
        double a = std::floor(lo / width + 0.5) - 0.5;
        double b = std::ceil(hi / width - 0.5) + 0.5;
        return Binning(a * width, b * width, static_cast<std::size_t>(std::llround(b - a)));
    }

    std::size_t size() const { return n_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    double width() const { return width_; }
    double center(std::size_t i) const
    {
        return lo_ + (static_cast<double>(i) + 0.5) * width_;
    }
    double edge(std::size_t i) const { return lo_ + static_cast<double>(i) * width_; }

    std::optional<std::size_t> index(double x) const
    {
        if (!(x >= lo_ && x < hi_))
            return std::nullopt;
        auto i = static_cast<std::size_t>((x - lo_) / width_);
        return std::min(i, n_ - 1);
    }

    bool operator==(Binning const& o) const
    {
        return lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_;
    }

  private:
    double lo_;
    double hi_;
    std::size_t n_;
    double width_;
};

//---------------------------------------------------------------------------//
/*!
 * Binned conditional means <tt>E(value | x in bin)</tt> with standard errors.
 *
 * Keeps raw sums so that tables from separate path chunks merge exactly.
 * Bins under \c min_occupancy report NaN estimates and are flagged unusable.
 */
class ConditionalMomentTable
{
  public:
    explicit ConditionalMomentTable(Binning bins,
                                    std::size_t min_occupancy = default_min_occupancy)
        : bins_(bins)
        , min_occupancy_(min_occupancy)
        , count_(bins.size(), 0)
        , sum_(bins.size(), 0.0)
        , sum_sq_(bins.size(), 0.0)
        , sum_x_(bins.size(), 0.0)
    {
    }

    void add(double x, double value)
    {
        auto i = bins_.index(x);
        if (!i)
            return;
        count_[*i] += 1;
        sum_[*i] += value;
        sum_sq_[*i] += value * value;
        sum_x_[*i] += x;
    }

    void merge(ConditionalMomentTable const& other)
    {
        if (!(bins_ == other.bins_))
            throw InvalidInput("ConditionalMomentTable: merging different binnings");
        for (std::size_t i = 0; i < bins_.size(); ++i)
        {
            count_[i] += other.count_[i];
            sum_[i] += other.sum_[i];
            sum_sq_[i] += other.sum_sq_[i];
            sum_x_[i] += other.sum_x_[i];
        }
        steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    }

    Binning const& binning() const { return bins_; }
    std::size_t size() const { return bins_.size(); }
    std::size_t min_occupancy() const { return min_occupancy_; }
    std::size_t count(std::size_t i) const { return count_[i]; }
    double center(std::size_t i) const { return bins_.center(i); }
    bool usable(std::size_t i) const { return count_[i] >= min_occupancy_; }

    std::size_t total_count() const
    {
        std::size_t n = 0;
        for (auto c : count_)
            n += c;
        return n;
    }

    double estimate(std::size_t i) const
    {
        if (!this->usable(i))
            return std::numeric_limits<double>::quiet_NaN();
        return sum_[i] / static_cast<double>(count_[i]);
    }

    double std_error(std::size_t i) const
    {
        if (!this->usable(i))
            return std::numeric_limits<double>::quiet_NaN();
        auto n = static_cast<double>(count_[i]);
        double mean = sum_[i] / n;
        double var = std::max(0.0, (sum_sq_[i] - n * mean * mean) / (n - 1));
        return std::sqrt(var / n);
    }

    //! In-bin mean of the conditioning position.
    double mean_position(std::size_t i) const
    {
        if (count_[i] == 0)
            return std::numeric_limits<double>::quiet_NaN();
        return sum_x_[i] / static_cast<double>(count_[i]);
    }

    //! Pooled mean and standard error over all binned samples.
    std::pair<double, double> overall() const
    {
        double n = 0, s = 0, s2 = 0;
        for (std::size_t i = 0; i < bins_.size(); ++i)
        {
            n += static_cast<double>(count_[i]);
            s += sum_[i];
            s2 += sum_sq_[i];
        }
        if (n < 2)
            return {std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
        double mean = s / n;
        double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1));
        return {mean, std::sqrt(var / n)};
    }

    //! Time indices whose samples were pooled into the table.
    std::vector<std::size_t> steps;

  private:
    Binning bins_;
    std::size_t min_occupancy_;
    std::vector<std::size_t> count_;
    std::vector<double> sum_;
    std::vector<double> sum_sq_;
    std::vector<double> sum_x_;
};

//! CSV with columns bin_center, count, estimate, std_error.
inline void write_table_csv(fs::path const& path, ConditionalMomentTable const& t)
{
    auto out = open_output(path);
    out << "bin_center,count,estimate,std_error\n";
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        out << format_double(t.center(i)) << ',' << t.count(i) << ','
            << format_double(t.estimate(i)) << ',' << format_double(t.std_error(i))
            << '\n';
    }
    check_written(out, path);
}

namespace detail
{
inline void require_steps(Ensemble const& e,
                          std::vector<std::size_t> const& steps,
                          int before,
                          int after,
                          char const* what)
{
    if (steps.empty())
        throw InvalidInput(std::string(what) + ": no time indices given");
    for (auto j : steps)
    {
        if (static_cast<long>(j) - before < 0 || j + static_cast<std::size_t>(after) > e.n_steps)
        {
            throw InvalidInput(std::string(what) + ": time index " + std::to_string(j)
                               + " needs neighbours outside [0, "
                               + std::to_string(e.n_steps) + "]");
        }
        for (int d = -before; d <= after; ++d)
        {
            auto s = static_cast<std::size_t>(static_cast<long>(j) + d);
            if (!e.recorded(s))
            {
                throw InvalidInput(std::string(what) + ": step " + std::to_string(s)
                                   + " was not recorded");
            }
        }
    }
}

template<class F>
ConditionalMomentTable pooled_table(Ensemble const& e,
                                    std::vector<std::size_t> const& steps,
                                    Binning const& bins,
                                    std::size_t min_occupancy,
                                    F&& value)
{
    ConditionalMomentTable table(bins, min_occupancy);
    table.steps = steps;
    for (auto j : steps)
    {
        auto x = e.at(j);
        RealField v = value(j);
        for (Eigen::Index k = 0; k < x.size(); ++k)
            table.add(x[k], v[k]);
    }
    return table;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// CONDITIONAL INCREMENT ESTIMATORS
//
// Each pools samples from every time index in \c steps (one index gives the
// textbook per-time table). The conditioning position is x(t_j).
//---------------------------------------------------------------------------//

//! Mean of (x_{j+1} - x_j)/dt given x_j.
inline ConditionalMomentTable
estimate_forward_drift(Ensemble const& e,
                       std::vector<std::size_t> const& steps,
                       Binning const& bins,
                       std::size_t min_occupancy = default_min_occupancy)
{
    detail::require_steps(e, steps, 0, 1, "estimate_forward_drift");
    return detail::pooled_table(e, steps, bins, min_occupancy, [&](std::size_t j) {
        return RealField((e.at(j + 1) - e.at(j)) / e.dt);
    });
}

//! Mean of (x_j - x_{j-1})/dt given x_j.
inline ConditionalMomentTable
estimate_backward_drift(Ensemble const& e,
                        std::vector<std::size_t> const& steps,
                        Binning const& bins,
                        std::size_t min_occupancy = default_min_occupancy)
{
    detail::require_steps(e, steps, 1, 0, "estimate_backward_drift");
    return detail::pooled_table(e, steps, bins, min_occupancy, [&](std::size_t j) {
        return RealField((e.at(j) - e.at(j - 1)) / e.dt);
    });
}

//! Mean of (x_{j+1} - x_j)^2/dt given x_j; tends to 2 nu as dt -> 0.
inline ConditionalMomentTable
estimate_quadratic_variation(Ensemble const& e,
                             std::vector<std::size_t> const& steps,
                             Binning const& bins,
                             std::size_t min_occupancy = default_min_occupancy)
{
    detail::require_steps(e, steps, 0, 1, "estimate_quadratic_variation");
    return detail::pooled_table(e, steps, bins, min_occupancy, [&](std::size_t j) {
        return RealField((e.at(j + 1) - e.at(j)).array().square() / e.dt);
    });
}

//---------------------------------------------------------------------------//
/*!
 * Second difference (x_{j+1} - 2 x_j + x_{j-1})/dt^2 given x_j.
 *
 * Its conditional mean is <tt>(b - b*)/dt + O(1)</tt>, so it only estimates
 * the mean acceleration where the osmotic velocity vanishes.
 */
inline ConditionalMomentTable
estimate_second_difference(Ensemble const& e,
                           std::vector<std::size_t> const& steps,
                           Binning const& bins,
                           std::size_t min_occupancy = default_min_occupancy)
{
    detail::require_steps(e, steps, 1, 1, "estimate_second_difference");
    double dt2 = e.dt * e.dt;
    return detail::pooled_table(e, steps, bins, min_occupancy, [&](std::size_t j) {
        return RealField((e.at(j + 1) - 2 * e.at(j) + e.at(j - 1)) / dt2);
    });
}

//---------------------------------------------------------------------------//
/*!
 * Mean acceleration <tt>(D D* x + D* D x)/2</tt> given x_j.
 *
 * The inner derivatives are the drifts themselves (<tt>Dx = b</tt>, <tt>D*x =
 * b*</tt>) read from the field at the path positions; the outer D and D* are
 * conditional forward and backward differences along the paths:
 * <tt>[b*(x_{j+1}, t_{j+1}) - b*(x_j, t_j) + b(x_j, t_j) - b(x_{j-1},
 * t_{j-1})] / 2dt</tt>.
 */
inline ConditionalMomentTable
estimate_mean_acceleration(Ensemble const& e,
                           DriftField const& df,
                           std::vector<std::size_t> const& steps,
                           Binning const& bins,
                           std::size_t min_occupancy = default_min_occupancy)
{
    detail::require_steps(e, steps, 1, 1, "estimate_mean_acceleration");
    ConditionalMomentTable table(bins, min_occupancy);
    table.steps = steps;
    for (auto j : steps)
    {
        RealField fwd_prev = df.forward_row(e.time(j - 1));
        RealField fwd_now = df.forward_row(e.time(j));
        RealField bwd_now = df.backward_row(e.time(j));
        RealField bwd_next = df.backward_row(e.time(j + 1));
        auto xp = e.at(j - 1);
        auto x = e.at(j);
        auto xn = e.at(j + 1);
        for (Eigen::Index k = 0; k < x.size(); ++k)
        {
            double forward_of_bstar = df.interpolate_row(bwd_next, xn[k])
                                      - df.interpolate_row(bwd_now, x[k]);
            double backward_of_b = df.interpolate_row(fwd_now, x[k])
                                   - df.interpolate_row(fwd_prev, xp[k]);
            table.add(x[k], 0.5 * (forward_of_bstar + backward_of_b) / e.dt);
        }
    }
    return table;
}

//---------------------------------------------------------------------------//
// DENSITIES AND MOMENTS
//---------------------------------------------------------------------------//

//! Normalized histogram with binomial standard errors.
struct DensityEstimate
{
    Binning bins;
    std::vector<std::size_t> count;
    std::vector<double> density;
    std::vector<double> std_error;
    std::size_t n_samples{0};

    //! L1 distance to the cell averages of a nodal reference density.
    double l1_distance(PiecewiseLinearDensity const& ref) const
    {
        double total = 0;
        for (std::size_t i = 0; i < bins.size(); ++i)
        {
            double a = bins.edge(i);
            double b = bins.edge(i + 1);
            double mass_ref = ref.mass_between(a, b) / ref.total();
            total += std::abs(density[i] * bins.width() - mass_ref);
        }
        // Reference mass outside the binned range counts fully.
        double outside = (ref.mass_below(bins.lo())
                          + ref.total() - ref.mass_below(bins.hi()))
                         / ref.total();
        return total + outside;
    }
};

inline DensityEstimate density_histogram(Ensemble const& e, std::size_t step, Binning const& bins)
{
    DensityEstimate d{bins, std::vector<std::size_t>(bins.size(), 0), {}, {}, 0};
    auto x = e.at(step);
    for (Eigen::Index k = 0; k < x.size(); ++k)
    {
        if (auto i = bins.index(x[k]))
            d.count[*i] += 1;
    }
    d.n_samples = static_cast<std::size_t>(x.size());
    auto n = static_cast<double>(d.n_samples);
    for (std::size_t i = 0; i < bins.size(); ++i)
    {
        double p = n > 0 ? static_cast<double>(d.count[i]) / n : 0.0;
        d.density.push_back(p / bins.width());
        d.std_error.push_back(n > 0 ? std::sqrt(p * (1 - p) / n) / bins.width() : 0.0);
    }
    return d;
}

inline void write_density_csv(fs::path const& path, DensityEstimate const& d)
{
    auto out = open_output(path);
    out << "bin_center,count,estimate,std_error\n";
    for (std::size_t i = 0; i < d.bins.size(); ++i)
    {
        out << format_double(d.bins.center(i)) << ',' << d.count[i] << ','
            << format_double(d.density[i]) << ',' << format_double(d.std_error[i]) << '\n';
    }
    check_written(out, path);
}

//! Sample mean and variance with their standard errors.
struct SampleMoments
{
    std::size_t n{0};
    double mean{0};
    double mean_se{0};
    double variance{0};
    double variance_se{0};
};

template<class Derived>
SampleMoments sample_moments(Eigen::MatrixBase<Derived> const& x)
{
    SampleMoments m;
    m.n = static_cast<std::size_t>(x.size());
    if (m.n < 2)
        throw InvalidInput("sample_moments: need at least two samples");
    auto n = static_cast<double>(m.n);
    m.mean = x.mean();
    double s2 = 0, s4 = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k)
    {
        double d = x[k] - m.mean;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    m.variance = s2 / (n - 1);
    double m2 = s2 / n;
    double m4 = s4 / n;
    m.mean_se = std::sqrt(m.variance / n);
    m.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    return m;
}

//---------------------------------------------------------------------------//
/*!
 * Two-time product moment <tt>E[x(t) x(t + lag dt)]</tt> pooled over origins.
 *
 * Each path contributes the mean of its products over the origins, so the
 * standard error is taken across independent paths.
 */
struct CorrelationEstimate
{
    double lag_time{0};
    double estimate{0};
    double std_error{0};
    std::size_t n_paths{0};
    std::size_t n_origins{0};
};

inline CorrelationEstimate estimate_two_time(Ensemble const& e,
                                             std::vector<std::size_t> const& origins,
                                             std::size_t lag)
{
    if (origins.empty())
        throw InvalidInput("estimate_two_time: no origins");
    if (e.n_paths < 2)
        throw InvalidInput("estimate_two_time: need at least two paths");
    RealField per_path = RealField::Zero(static_cast<Eigen::Index>(e.n_paths));
    for (auto j : origins)
    {
        if (j + lag > e.n_steps)
            throw InvalidInput("estimate_two_time: origin plus lag beyond the last step");
        per_path += e.at(j).cwiseProduct(e.at(j + lag));
    }
    per_path /= static_cast<double>(origins.size());
    auto m = sample_moments(per_path);
    return {static_cast<double>(lag) * e.dt, m.mean, m.mean_se, e.n_paths, origins.size()};
}

//! Recorded steps j in [first, last] with j + offset also recorded.
inline std::vector<std::size_t>
paired_steps(Ensemble const& e, std::size_t first, std::size_t last, int before, int after)
{
    std::vector<std::size_t> out;
    for (auto j : e.steps)
    {
        if (j < first || j > last)
            continue;
        if (static_cast<long>(j) - before < 0 || j + static_cast<std::size_t>(after) > e.n_steps)
            continue;
        bool ok = true;
        for (int d = -before; d <= after && ok; ++d)
            ok = e.recorded(static_cast<std::size_t>(static_cast<long>(j) + d));
        if (ok)
            out.push_back(j);
    }
    return out;
}

}  // namespace smlab
