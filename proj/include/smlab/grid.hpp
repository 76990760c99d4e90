#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "smlab/error.hpp"

namespace smlab
{
using RealField = Eigen::VectorXd;
using ComplexField = Eigen::VectorXcd;

//---------------------------------------------------------------------------//
/*!
 * Uniform one-dimensional grid.
 *
 * Node \c i sits at <tt>x_min + i * dx</tt>; the last node equals \c x_max up
 * to rounding. Node differences are always formed from index offsets so that
 * stencil identities are not polluted by coordinate rounding.
 */
class Grid1D
{
  public:
    Grid1D(double x_min, double x_max, std::size_t n)
        : x_min_(x_min), x_max_(x_max), n_(n)
    {
        if (!(std::isfinite(x_min) && std::isfinite(x_max)) || !(x_max > x_min))
        {
            throw InvalidInput("Grid1D: require finite x_max > x_min");
        }
        if (n < 3)
        {
            throw InvalidInput("Grid1D: need at least 3 nodes, got "
                               + std::to_string(n));
        }
        dx_ = (x_max - x_min) / static_cast<double>(n - 1);
    }

    //! Grid with spacing close to \c dx covering [x_min, x_max].
    static Grid1D with_spacing(double x_min, double x_max, double dx)
    {
        if (!(dx > 0))
        {
            throw InvalidInput("Grid1D: spacing must be positive");
        }
        auto n = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
        return Grid1D(x_min, x_max, n);
    }

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    std::size_t size() const { return n_; }
    double dx() const { return dx_; }

    double x(std::size_t i) const
    {
        return x_min_ + static_cast<double>(i) * dx_;
    }

    RealField nodes() const
    {
        RealField result(static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i)
            result[static_cast<Eigen::Index>(i)] = this->x(i);
        return result;
    }

    //! Field sampled from a callable at every node.
    template<class F>
    auto sample(F&& f) const
    {
        using Value = decltype(f(0.0));
        Eigen::Matrix<Value, Eigen::Dynamic, 1> result(static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i)
            result[static_cast<Eigen::Index>(i)] = f(this->x(i));
        return result;
    }

    bool operator==(Grid1D const& other) const
    {
        return x_min_ == other.x_min_ && x_max_ == other.x_max_
               && n_ == other.n_;
    }

  private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double dx_;
};

//---------------------------------------------------------------------------//
// QUADRATURE
//---------------------------------------------------------------------------//
//! Trapezoidal integral of nodal values.
template<class Derived>
auto trapezoid(Grid1D const& grid, Eigen::MatrixBase<Derived> const& f)
{
    auto n = f.size();
    auto sum = f.sum() - 0.5 * (f[0] + f[n - 1]);
    return sum * grid.dx();
}

inline void require_size(Grid1D const& grid, Eigen::Index size, char const* what)
{
    if (size != static_cast<Eigen::Index>(grid.size()))
    {
        throw InvalidInput(std::string(what) + ": field has "
                           + std::to_string(size) + " nodes, grid has "
                           + std::to_string(grid.size()));
    }
}

}  // namespace smlab
