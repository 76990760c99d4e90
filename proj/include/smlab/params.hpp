#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "smlab/error.hpp"

namespace smlab
{
using Complex = std::complex<double>;

//! Whether the diffusion constant is physical or analytically continued.
enum class Mode
{
    real,
    continued_plus,   //!< nu = +i hbar / 2m
    continued_minus,  //!< nu = -i hbar / 2m
};

//! Which member of the (nu, z, beta) family a value specifies.
enum class ParamKind
{
    nu,
    z,
    beta,
};

inline char const* to_string(Mode m)
{
    switch (m)
    {
        case Mode::real:
            return "real";
        case Mode::continued_plus:
            return "continued-plus";
        case Mode::continued_minus:
            return "continued-minus";
    }
    return "?";
}

inline Mode mode_from_string(std::string const& s)
{
    if (s == "real")
        return Mode::real;
    if (s == "continued-plus" || s == "plus")
        return Mode::continued_plus;
    if (s == "continued-minus" || s == "minus")
        return Mode::continued_minus;
    throw InvalidInput("unknown diffusion mode '" + s + "'");
}

//---------------------------------------------------------------------------//
/*!
 * Diffusion constant of the family together with its dimensionless labels.
 *
 * In real mode \c nu is a positive real, <tt>z = 2 m nu / hbar</tt> and
 * <tt>z = 1 / sqrt(1 - beta / 2)</tt>. In continued mode <tt>nu = +-i hbar /
 * 2m</tt> and <tt>z = +-i</tt>, which formally corresponds to <tt>beta =
 * 4</tt>. The ratio <tt>2 nu / z = hbar / m</tt> holds in every mode.
 */
struct DiffusionParams
{
    double mass{1};
    double hbar{1};
    Complex nu{0.5, 0};
    Complex z{1, 0};
    double beta{0};
    Mode mode{Mode::real};

    bool is_real() const { return mode == Mode::real; }

    //! +1 for the plus branch, -1 for the minus branch, 0 in real mode.
    int branch() const
    {
        return mode == Mode::continued_plus    ? 1
               : mode == Mode::continued_minus ? -1
                                               : 0;
    }

    double nu_real() const
    {
        if (!this->is_real())
        {
            throw UnsupportedConfiguration(
                std::string("real diffusion constant requested in ")
                + to_string(mode) + " mode");
        }
        return nu.real();
    }

    //! Coefficient hbar^2/2m + 2 m nu^2 of the density-dependent terms.
    Complex rho_coefficient() const
    {
        return Complex(hbar * hbar / (2 * mass), 0) + 2.0 * mass * nu * nu;
    }

    //! Current-velocity scale 2 nu / z, always hbar / m.
    Complex current_scale() const { return 2.0 * nu / z; }
};

//---------------------------------------------------------------------------//
/*!
 * Build a consistent parameter set from one of nu, z or beta.
 *
 * In continued mode \c value is ignored: the branch is fixed by \c mode.
 */
inline DiffusionParams diffusion_params(ParamKind kind,
                                        double value,
                                        double mass = 1,
                                        double hbar = 1,
                                        Mode mode = Mode::real)
{
    if (!(mass > 0) || !(hbar > 0))
    {
        throw DomainError("diffusion_params: mass and hbar must be positive");
    }
    DiffusionParams p;
    p.mass = mass;
    p.hbar = hbar;
    p.mode = mode;
    if (mode != Mode::real)
    {
        double sign = mode == Mode::continued_plus ? 1.0 : -1.0;
        p.nu = Complex(0, sign * hbar / (2 * mass));
        p.z = Complex(0, sign);
        p.beta = 4;
        return p;
    }

    double z = 0;
    switch (kind)
    {
        case ParamKind::nu:
            if (!(value > 0) || !std::isfinite(value))
            {
                throw DomainError("diffusion_params: nu must be positive, got "
                                  + std::to_string(value));
            }
            z = 2 * mass * value / hbar;
            break;
        case ParamKind::z:
            if (!(value > 0) || !std::isfinite(value))
            {
                throw DomainError("diffusion_params: z must be positive, got "
                                  + std::to_string(value));
            }
            z = value;
            break;
        case ParamKind::beta:
            if (!(value < 2) || !std::isfinite(value))
            {
                throw DomainError("diffusion_params: beta must be < 2, got "
                                  + std::to_string(value));
            }
            z = 1 / std::sqrt(1 - value / 2);
            break;
    }
    p.z = Complex(z, 0);
    p.nu = Complex(kind == ParamKind::nu ? value : z * hbar / (2 * mass), 0);
    p.beta = kind == ParamKind::beta ? value : 2 * (1 - 1 / (z * z));
    return p;
}

//! Real-mode shorthand.
inline DiffusionParams params_from_nu(double nu, double mass = 1, double hbar = 1)
{
    return diffusion_params(ParamKind::nu, nu, mass, hbar);
}

}  // namespace smlab
