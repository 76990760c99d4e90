#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "smlab/algebra/operators.hpp"

namespace smlab
{
//---------------------------------------------------------------------------//
// RECURSION AND TAYLOR SERIES
//---------------------------------------------------------------------------//

namespace detail
{
//! Scale <tt>1 / 2 m nu</tt> of the recursion; <tt>i / hbar</tt> on the minus branch.
inline Complex recursion_scale(DiffusionParams const& p)
{
    return 1.0 / (2.0 * p.mass * p.nu);
}

inline void require_stationary(OperatorMatrix const& h, DiffusionParams const& p, char const* what)
{
    if (p.is_real() && !h.stationary)
    {
        throw UnsupportedConfiguration(std::string(what)
                                       + ": real-mode multi-time formulas need a stationary density");
    }
}
}  // namespace detail

/*!
 * Time derivatives <tt>X^1 .. X^n</tt> with <tt>X^{k+1} = [H, X^k] / 2 m nu</tt>.
 *
 * After continuation the scale is <tt>-+ i / hbar</tt>, so this is the
 * Heisenberg equation of motion.
 */
inline std::vector<OperatorMatrix> time_derivative_recursion(OperatorMatrix const& x,
                                                             OperatorMatrix const& h,
                                                             DiffusionParams const& p,
                                                             std::size_t n_target)
{
    detail::require_stationary(h, p, "time_derivative_recursion");
    if (x.size() != h.size())
        throw InvalidInput("time_derivative_recursion: dimension mismatch");
    Complex scale = detail::recursion_scale(p);
    std::vector<OperatorMatrix> out;
    out.reserve(n_target);
    OperatorMatrix prev = x;
    for (std::size_t k = 1; k <= n_target; ++k)
    {
        OperatorMatrix next = commutator(h, prev);
        next.m *= scale;
        next.label = x.label + "^" + std::to_string(k);
        next.kind = OperatorMatrix::Kind::general;
        out.push_back(next);
        prev = std::move(next);
    }
    return out;
}

//! <tt>sum_{k <= order} X^k s^k / k!</tt>.
inline OperatorMatrix taylor_heisenberg(OperatorMatrix const& x,
                                        OperatorMatrix const& h,
                                        double s,
                                        std::size_t order,
                                        DiffusionParams const& p)
{
    OperatorMatrix sum = x;
    sum.kind = OperatorMatrix::Kind::general;
    if (order > 0)
    {
        auto terms = time_derivative_recursion(x, h, p, order);
        double c = 1;
        for (std::size_t k = 1; k <= order; ++k)
        {
            c *= s / static_cast<double>(k);
            sum.m += c * terms[k - 1].m;
        }
    }
    sum.label = x.label + "_taylor" + std::to_string(order);
    return sum;
}

//---------------------------------------------------------------------------//
// SPECTRAL PROPAGATION
//---------------------------------------------------------------------------//

/*!
 * Eigendecomposition of the Hamiltonian restricted to interior nodes.
 *
 * The restriction is the hard-wall operator: boundary rows and columns of
 * the result are zero. Valid when the interior block is real symmetric,
 * which holds for both modes (the kinetic coefficient 2 m nu^2 is real).
 */
class InteriorSpectrum
{
  public:
    InteriorSpectrum(OperatorMatrix const& h, DiffusionParams const& p)
        : n_(h.size()), scale_(detail::recursion_scale(p)), dx_(h.dx)
    {
        detail::require_stationary(h, p, "InteriorSpectrum");
        if (n_ < 3)
            throw InvalidInput("InteriorSpectrum: need interior nodes");
        ComplexMatrix block = h.m.block(1, 1, n_ - 2, n_ - 2);
        double top = block.cwiseAbs().maxCoeff();
        double asym = (block - block.transpose()).cwiseAbs().maxCoeff();
        double imag = block.imag().cwiseAbs().maxCoeff();
        if (asym > 1e-12 * top || imag > 1e-12 * top)
            throw NumericalBreakdown("InteriorSpectrum: interior Hamiltonian is not real symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block.real());
        if (solver.info() != Eigen::Success)
            throw NumericalBreakdown("InteriorSpectrum: eigendecomposition failed");
        values_ = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
    }

    Eigen::Index interior_size() const { return n_ - 2; }
    Eigen::VectorXd const& values() const { return values_; }
    Eigen::MatrixXd const& vectors() const { return vectors_; }

    //! Eigenvector k on the full grid, normalized to <tt>sum |q|^2 dx = 1</tt>.
    ComplexField mode(Eigen::Index k) const
    {
        ComplexField f = ComplexField::Zero(n_);
        f.segment(1, n_ - 2) = vectors_.col(k).cast<Complex>() / std::sqrt(dx_);
        return f;
    }

    //! <tt>exp(s H / 2 m nu) A exp(-s H / 2 m nu)</tt> on the interior block.
    ComplexMatrix conjugate(ComplexMatrix const& a, double s) const
    {
        ComplexMatrix inner = sandwich(vectors_.transpose(), a.block(1, 1, n_ - 2, n_ - 2),
                                       vectors_);
        Eigen::VectorXcd phase = (scale_ * s * values_.cast<Complex>()).array().exp().matrix();
        for (Eigen::Index j = 0; j < inner.cols(); ++j)
        {
            Complex back = 1.0 / phase[j];
            for (Eigen::Index i = 0; i < inner.rows(); ++i)
                inner(i, j) *= phase[i] * back;
        }
        ComplexMatrix out = ComplexMatrix::Zero(n_, n_);
        out.block(1, 1, n_ - 2, n_ - 2) = sandwich(vectors_, inner, vectors_.transpose());
        return out;
    }

    //! <tt>exp(s (H / 2 m nu - shift)) f</tt> on the interior block.
    ComplexField propagate(ComplexField const& f, double s, Complex shift = 0) const
    {
        require_interior(f.size());
        Eigen::MatrixXcd q = vectors_.cast<Complex>();
        Eigen::VectorXcd c = q.adjoint() * f.segment(1, n_ - 2);
        for (Eigen::Index k = 0; k < c.size(); ++k)
            c[k] *= std::exp(s * (scale_ * values_[k] - shift));
        ComplexField out = ComplexField::Zero(n_);
        out.segment(1, n_ - 2) = q * c;
        return out;
    }

  private:
    Eigen::Index n_;
    Complex scale_;
    double dx_;
    Eigen::VectorXd values_;
    Eigen::MatrixXd vectors_;

    //! <tt>L A R</tt> for real L, R: two real products per side instead of complex ones.
    static ComplexMatrix sandwich(Eigen::MatrixXd const& l, ComplexMatrix const& a,
                                  Eigen::MatrixXd const& r)
    {
        Eigen::MatrixXd re = l * a.real() * r;
        Eigen::MatrixXd im = l * a.imag() * r;
        ComplexMatrix out(re.rows(), re.cols());
        out.real() = re;
        out.imag() = im;
        return out;
    }

    void require_interior(Eigen::Index size) const
    {
        if (size != n_)
            throw InvalidInput("InteriorSpectrum: dimension mismatch");
    }
};

//! H with boundary rows and columns zeroed: the operator InteriorSpectrum diagonalizes.
inline OperatorMatrix hard_wall(OperatorMatrix h)
{
    Eigen::Index n = h.size();
    h.m.row(0).setZero();
    h.m.row(n - 1).setZero();
    h.m.col(0).setZero();
    h.m.col(n - 1).setZero();
    h.label += "_walls";
    return h;
}

/*!
 * Heisenberg operator <tt>X(s) = exp(-+ i H s / hbar) X exp(+- i H s / hbar)</tt>.
 *
 * Continued mode only: in real mode the backward factor is an
 * anti-diffusion and is not bounded. Use semigroup_correlation there.
 */
inline OperatorMatrix heisenberg_operator(OperatorMatrix const& x,
                                          OperatorMatrix const& h,
                                          double s,
                                          DiffusionParams const& p)
{
    if (p.is_real())
    {
        throw UnsupportedConfiguration(
            "heisenberg_operator: continued mode only; use semigroup_correlation for real nu");
    }
    InteriorSpectrum spec(h, p);
    OperatorMatrix out = x;
    out.kind = OperatorMatrix::Kind::general;
    out.m = spec.conjugate(x.m, s);
    out.label = x.label + "(s)";
    return out;
}

//---------------------------------------------------------------------------//
// CORRELATIONS
//---------------------------------------------------------------------------//

/*!
 * <tt>(state, op_n ... op_1 state)</tt> in the given space.
 *
 * \c ops is in time order: ops[0] is the earliest and acts first.
 */
inline Complex correlation(ComplexField const& state,
                           std::vector<OperatorMatrix> const& ops,
                           WeightedSpace const& space)
{
    require_size(space.grid, state.size(), "correlation: state");
    ComplexField v = state;
    for (auto const& op : ops)
    {
        if (op.size() != state.size())
            throw InvalidInput("correlation: operator '" + op.label + "' has the wrong dimension");
        v = op.m * v;
    }
    return space.inner(state, v);
}

/*!
 * Real-mode stationary two-time correlation
 * <tt>(T1, X exp(s (K - kappa0)) X T1)</tt> with <tt>K = H / 2 m nu</tt>.
 *
 * \c kappa0 is the Rayleigh quotient of T1 under K, the eigenvalue of the
 * stationary state; subtracting it makes T1 invariant. The forward
 * semigroup is the bounded direction of the real-mode evolution and equals
 * the Monte Carlo autocovariance <tt>E[x(t) x(t+s)]</tt>.
 */
inline Complex semigroup_correlation(ComplexField const& state,
                                     OperatorMatrix const& x,
                                     OperatorMatrix const& h,
                                     double s,
                                     DiffusionParams const& p,
                                     WeightedSpace const& space)
{
    if (!(s >= 0))
        throw InvalidInput("semigroup_correlation: lag must be non-negative");
    InteriorSpectrum spec(h, p);
    Complex scale = detail::recursion_scale(p);
    ComplexField hs = h.m * state;
    Complex kappa0 = scale * space.inner(state, hs) / space.inner(state, state);
    ComplexField v = x.m * state;
    v = spec.propagate(v, s, kappa0);
    v = x.m * v;
    return space.inner(state, v);
}

//---------------------------------------------------------------------------//
// LOW-ENERGY COMPARISONS
//---------------------------------------------------------------------------//

//! Lowest \c k interior eigenvectors of H as columns, each of unit L2 norm.
inline ComplexMatrix low_energy_basis(InteriorSpectrum const& spec, Eigen::Index k)
{
    if (k <= 0 || k > spec.interior_size())
        throw InvalidInput("low_energy_basis: requested size out of range");
    ComplexMatrix q(spec.interior_size() + 2, k);
    for (Eigen::Index j = 0; j < k; ++j)
        q.col(j) = spec.mode(j);
    return q;
}

/*!
 * Largest matrix element of <tt>A - B</tt> between low-energy states,
 * <tt>max |(q_i, (A - B) q_j)_{L2}|</tt>.
 */
inline double subspace_gap(ComplexMatrix const& a, ComplexMatrix const& b,
                           ComplexMatrix const& basis, double dx)
{
    ComplexMatrix d = basis.adjoint() * (a - b) * basis * dx;
    return d.cwiseAbs().maxCoeff();
}

}  // namespace smlab
