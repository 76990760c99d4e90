#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "smlab/fields/wave.hpp"

namespace smlab
{
enum class OracleKind
{
    ho_ground,
    ho_coherent,
    free_gaussian,
};

inline OracleKind oracle_from_string(std::string const& s)
{
    if (s == "ho_ground")
        return OracleKind::ho_ground;
    if (s == "ho_coherent")
        return OracleKind::ho_coherent;
    if (s == "free_gaussian")
        return OracleKind::free_gaussian;
    throw InvalidInput("analytic_oracle: unsupported kind '" + s + "'");
}

inline char const* to_string(OracleKind k)
{
    switch (k)
    {
        case OracleKind::ho_ground:
            return "ho_ground";
        case OracleKind::ho_coherent:
            return "ho_coherent";
        case OracleKind::free_gaussian:
            return "free_gaussian";
    }
    return "?";
}

struct OracleParams
{
    double mass{1};
    double hbar{1};
    double omega{1};
    //! Initial displacement of the coherent state.
    double x0{0};
    //! Initial position spread of the free packet (density standard deviation).
    double sigma0{1};
};

//! Closed-form psi(x, t) of an oracle state.
inline std::complex<double>
oracle_psi(OracleKind kind, OracleParams const& p, double x, double t)
{
    using C = std::complex<double>;
    constexpr double pi = std::numbers::pi;
    switch (kind)
    {
        case OracleKind::ho_ground: {
            double a = p.mass * p.omega / p.hbar;
            return std::pow(a / pi, 0.25) * std::exp(-0.5 * a * x * x)
                   * std::exp(C(0, -0.5 * p.omega * t));
        }
        case OracleKind::ho_coherent: {
            double a = p.mass * p.omega / p.hbar;
            double xc = p.x0 * std::cos(p.omega * t);
            double pc = -p.mass * p.omega * p.x0 * std::sin(p.omega * t);
            double dxc = x - xc;
            C exponent(-0.5 * a * dxc * dxc,
                       pc * (x - 0.5 * xc) / p.hbar - 0.5 * p.omega * t);
            return std::pow(a / pi, 0.25) * std::exp(exponent);
        }
        case OracleKind::free_gaussian: {
            double s2 = p.sigma0 * p.sigma0;
            C spread(1.0, p.hbar * t / (2 * p.mass * s2));
            return std::pow(2 * pi * s2, -0.25) / std::sqrt(spread)
                   * std::exp(-x * x / (4 * s2 * spread));
        }
    }
    throw InvalidInput("analytic_oracle: unsupported kind");
}

//! Density variance of the free packet at time \c t.
inline double free_gaussian_variance(OracleParams const& p, double t)
{
    double s2 = p.sigma0 * p.sigma0;
    double r = p.hbar * t / (2 * p.mass * s2);
    return s2 * (1 + r * r);
}

//! Center of the coherent-state density at time \c t.
inline double coherent_center(OracleParams const& p, double t)
{
    return p.x0 * std::cos(p.omega * t);
}

//---------------------------------------------------------------------------//
/*!
 * Exact reference states sampled on a grid.
 *
 * Rejects grids whose end nodes carry density of 1e-12 or more at any
 * requested time.
 */
inline WaveSolution analytic_oracle(OracleKind kind,
                                    OracleParams const& p,
                                    Grid1D const& grid,
                                    std::vector<double> const& times,
                                    double rho_floor = default_rho_floor)
{
    if (!(p.mass > 0 && p.hbar > 0))
        throw InvalidInput("analytic_oracle: mass and hbar must be positive");
    if (kind != OracleKind::free_gaussian && !(p.omega > 0))
        throw InvalidInput("analytic_oracle: omega must be positive");
    if (kind == OracleKind::free_gaussian && !(p.sigma0 > 0))
        throw InvalidInput("analytic_oracle: sigma0 must be positive");
    if (times.empty())
        throw InvalidInput("analytic_oracle: no times requested");

    WaveSolution ws(grid, rho_floor);
    for (double t : times)
    {
        ComplexField psi = grid.sample(
            [&](double x) { return oracle_psi(kind, p, x, t); });
        auto n = psi.size();
        double edge = std::max(std::norm(psi[0]), std::norm(psi[n - 1]));
        if (!(edge < 1e-12))
        {
            throw InvalidInput(std::string("analytic_oracle: grid too narrow for ")
                               + to_string(kind) + " at t = "
                               + std::to_string(t));
        }
        ws.push(t, std::move(psi));
    }
    return ws;
}

//! Evenly spaced instants <tt>0, dt, ..., n dt</tt>.
inline std::vector<double> uniform_times(double dt, std::size_t n)
{
    std::vector<double> t(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        t[k] = static_cast<double>(k) * dt;
    return t;
}

}  // namespace smlab
