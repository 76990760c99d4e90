#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "smlab/grid.hpp"

namespace smlab
{
//! Per-node flag: nonzero where a field is defined.
using Mask = std::vector<std::uint8_t>;

//! Half-open node range [begin, end).
struct Region
{
    std::size_t begin;
    std::size_t end;

    std::size_t size() const { return end - begin; }
};

inline Mask full_mask(std::size_t n)
{
    return Mask(n, 1);
}

//! Maximal runs of set nodes, in increasing order.
inline std::vector<Region> regions(Mask const& mask)
{
    std::vector<Region> result;
    std::size_t i = 0;
    while (i < mask.size())
    {
        if (!mask[i])
        {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j])
            ++j;
        result.push_back({i, j});
        i = j;
    }
    return result;
}

//! Nodes whose stencil of half-width \c depth lies inside the same region.
inline Mask shrink_mask(Mask const& mask, std::size_t depth)
{
    Mask result(mask.size(), 0);
    for (auto r : regions(mask))
    {
        if (r.size() <= 2 * depth)
            continue;
        for (std::size_t i = r.begin + depth; i < r.end - depth; ++i)
            result[i] = 1;
    }
    return result;
}

namespace detail
{
inline double nan()
{
    return std::numeric_limits<double>::quiet_NaN();
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * First derivative on each masked region.
 *
 * Second-order central differences inside a region, second-order one-sided
 * differences at its two ends. Two-node regions fall back to a first-order
 * difference and isolated nodes get zero. Unmasked nodes are NaN.
 */
template<class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
derivative(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& f,
           double dx,
           Mask const& mask)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec g = Vec::Constant(f.size(), Scalar(detail::nan()));
    double const h2 = 2 * dx;
    for (auto r : regions(mask))
    {
        auto b = static_cast<Eigen::Index>(r.begin);
        auto e = static_cast<Eigen::Index>(r.end);
        if (r.size() == 1)
        {
            g[b] = Scalar(0);
            continue;
        }
        if (r.size() == 2)
        {
            g[b] = g[b + 1] = (f[b + 1] - f[b]) / dx;
            continue;
        }
        for (auto i = b + 1; i < e - 1; ++i)
            g[i] = (f[i + 1] - f[i - 1]) / h2;
        g[b] = (-3.0 * f[b] + 4.0 * f[b + 1] - f[b + 2]) / h2;
        g[e - 1] = (3.0 * f[e - 1] - 4.0 * f[e - 2] + f[e - 3]) / h2;
    }
    return g;
}

//! Second derivative with the same region conventions.
template<class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
second_derivative(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& f,
                  double dx,
                  Mask const& mask)
{
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Vec g = Vec::Constant(f.size(), Scalar(detail::nan()));
    double const h2 = dx * dx;
    for (auto r : regions(mask))
    {
        auto b = static_cast<Eigen::Index>(r.begin);
        auto e = static_cast<Eigen::Index>(r.end);
        if (r.size() < 3)
        {
            for (auto i = b; i < e; ++i)
                g[i] = Scalar(0);
            continue;
        }
        for (auto i = b + 1; i < e - 1; ++i)
            g[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
        if (r.size() == 3)
        {
            g[b] = g[e - 1] = g[b + 1];
            continue;
        }
        g[b] = (2.0 * f[b] - 5.0 * f[b + 1] + 4.0 * f[b + 2] - f[b + 3]) / h2;
        g[e - 1] = (2.0 * f[e - 1] - 5.0 * f[e - 2] + 4.0 * f[e - 3]
                    - f[e - 4])
                   / h2;
    }
    return g;
}

//! Derivatives over the whole grid.
template<class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
derivative(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& f, double dx)
{
    return derivative(f, dx, full_mask(static_cast<std::size_t>(f.size())));
}

template<class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
second_derivative(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& f, double dx)
{
    return second_derivative(f, dx,
                             full_mask(static_cast<std::size_t>(f.size())));
}

//---------------------------------------------------------------------------//
/*!
 * Laplacian of \c exp(R) divided by \c exp(R), evaluated from log-amplitude.
 *
 * Uses the same stencils as \c second_derivative applied to \c sqrt(rho) but
 * forms the ratio through <tt>exp(R_j - R_i)</tt>, so tails far below the
 * floating-point range of rho stay finite.
 */
inline RealField laplacian_ratio(RealField const& R, double dx, Mask const& mask)
{
    RealField g = RealField::Constant(R.size(), detail::nan());
    double const h2 = dx * dx;
    auto ratio = [&R](Eigen::Index j, Eigen::Index i) {
        return std::exp(R[j] - R[i]);
    };
    for (auto r : regions(mask))
    {
        auto b = static_cast<Eigen::Index>(r.begin);
        auto e = static_cast<Eigen::Index>(r.end);
        if (r.size() < 4)
        {
            for (auto i = b; i < e; ++i)
                g[i] = 0;
            continue;
        }
        for (auto i = b + 1; i < e - 1; ++i)
            g[i] = (ratio(i + 1, i) - 2.0 + ratio(i - 1, i)) / h2;
        g[b] = (2.0 - 5.0 * ratio(b + 1, b) + 4.0 * ratio(b + 2, b)
                - ratio(b + 3, b))
               / h2;
        g[e - 1] = (2.0 - 5.0 * ratio(e - 2, e - 1) + 4.0 * ratio(e - 3, e - 1)
                    - ratio(e - 4, e - 1))
                   / h2;
    }
    return g;
}

}  // namespace smlab
