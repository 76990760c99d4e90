#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "smlab/grid.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Nodal density interpreted as piecewise linear between grid nodes.
 *
 * Its integral is the trapezoidal rule, so the CDF is exact per cell and
 * inverts by a quadratic solve.
 */
class PiecewiseLinearDensity
{
  public:
    PiecewiseLinearDensity(Grid1D grid, RealField rho)
        : grid_(grid), rho_(std::move(rho))
    {
        require_size(grid_, rho_.size(), "PiecewiseLinearDensity");
        if (!rho_.allFinite() || rho_.minCoeff() < 0)
            throw InvalidInput("density must be finite and non-negative");
        auto n = grid_.size();
        cumulative_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            auto a = static_cast<Eigen::Index>(i);
            cumulative_[i + 1] = cumulative_[i] + 0.5 * grid_.dx() * (rho_[a] + rho_[a + 1]);
        }
        if (!(cumulative_.back() > 0))
            throw InvalidInput("density has zero mass");
    }

    double total() const { return cumulative_.back(); }
    Grid1D const& grid() const { return grid_; }
    RealField const& values() const { return rho_; }

    //! Unnormalized mass to the left of x.
    double mass_below(double x) const
    {
        double u = (x - grid_.x_min()) / grid_.dx();
        if (u <= 0)
            return 0;
        auto last = grid_.size() - 1;
        if (u >= static_cast<double>(last))
            return this->total();
        auto i = static_cast<std::size_t>(u);
        double s = (u - static_cast<double>(i)) * grid_.dx();
        auto a = static_cast<Eigen::Index>(i);
        double slope = (rho_[a + 1] - rho_[a]) / grid_.dx();
        return cumulative_[i] + rho_[a] * s + 0.5 * slope * s * s;
    }

    //! Unnormalized mass on [a, b].
    double mass_between(double a, double b) const
    {
        return this->mass_below(b) - this->mass_below(a);
    }

    //! Position whose normalized CDF equals \c u in (0, 1).
    double inverse_cdf(double u) const
    {
        double target = u * this->total();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        if (it == cumulative_.begin())
            return grid_.x_min();
        if (it == cumulative_.end())
        {
            // Only reachable by rounding at u close to 1: last cell with mass.
            it = std::lower_bound(cumulative_.begin(), cumulative_.end(), this->total());
            return grid_.x(static_cast<std::size_t>(it - cumulative_.begin()));
        }
        auto i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        auto a = static_cast<Eigen::Index>(i);
        double r = target - cumulative_[i];
        double dx = grid_.dx();
        double r0 = rho_[a];
        double slope = (rho_[a + 1] - r0) / dx;
        // r0 s + slope s^2 / 2 = r, in the cancellation-free form.
        double disc = std::max(0.0, r0 * r0 + 2 * slope * r);
        double denom = r0 + std::sqrt(disc);
        double s = denom > 0 ? 2 * r / denom : 0.0;
        s = std::clamp(s, 0.0, dx);
        return grid_.x(i) + s;
    }

  private:
    Grid1D grid_;
    RealField rho_;
    std::vector<double> cumulative_;
};

}  // namespace smlab
