#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "smlab/fields/wave.hpp"
#include "smlab/params.hpp"

namespace smlab
{
using ComplexMatrix = Eigen::MatrixXcd;

enum class SpaceKind
{
    density,    //!< Weight rho: the space H_t of functions of the process
    phase,      //!< Weight exp(-2 Re S_N): the image space I_t of the T-map
    lebesgue,   //!< Weight 1
};

inline char const* to_string(SpaceKind k)
{
    switch (k)
    {
        case SpaceKind::density:
            return "H_t";
        case SpaceKind::phase:
            return "I_t";
        case SpaceKind::lebesgue:
            return "L2";
    }
    return "?";
}

//---------------------------------------------------------------------------//
/*!
 * Grid functions with inner product <tt>(f, g) = sum_i w_i conj(f_i) g_i dx</tt>.
 */
struct WeightedSpace
{
    Grid1D grid;
    RealField weight;
    SpaceKind kind{SpaceKind::lebesgue};

    std::size_t size() const { return grid.size(); }

    template<class A, class B>
    Complex inner(Eigen::MatrixBase<A> const& f, Eigen::MatrixBase<B> const& g) const
    {
        require_size(grid, f.size(), "WeightedSpace::inner");
        require_size(grid, g.size(), "WeightedSpace::inner");
        Complex sum = 0;
        for (Eigen::Index i = 0; i < f.size(); ++i)
            sum += weight[i] * std::conj(Complex(f[i])) * Complex(g[i]);
        return sum * grid.dx();
    }

    template<class A>
    double norm(Eigen::MatrixBase<A> const& f) const
    {
        return std::sqrt(std::max(0.0, this->inner(f, f).real()));
    }
};

//---------------------------------------------------------------------------//
/*!
 * Inner-product space of the given kind.
 *
 * \c field is rho for the density space (floored at <tt>floor * max rho</tt>)
 * and S_N for the phase space; it is ignored for L2.
 */
inline WeightedSpace build_space(Grid1D const& grid,
                                 SpaceKind kind,
                                 ComplexField const& field = {},
                                 double floor = default_rho_floor)
{
    WeightedSpace s{grid, RealField::Ones(static_cast<Eigen::Index>(grid.size())), kind};
    if (kind == SpaceKind::lebesgue)
        return s;
    require_size(grid, field.size(), "build_space");
    if (!field.allFinite())
        throw InvalidInput("build_space: weight field must be finite");
    if (kind == SpaceKind::density)
    {
        RealField rho = field.real();
        double top = rho.maxCoeff();
        if (!(top > 0) || rho.minCoeff() < 0)
            throw InvalidInput("build_space: density must be non-negative with positive mass");
        s.weight = rho.cwiseMax(floor * top);
    }
    else
    {
        s.weight = (-2.0 * field.real()).array().exp().matrix();
    }
    if (!(s.weight.minCoeff() > 0) || !s.weight.allFinite())
        throw InvalidInput(std::string("build_space: non-positive weight for ") + to_string(kind));
    return s;
}

//---------------------------------------------------------------------------//
/*!
 * Dense operator on grid functions.
 *
 * Position operators are tagged so that commutators with them are formed
 * entrywise from node offsets, free of cancellation.
 */
struct OperatorMatrix
{
    enum class Kind
    {
        general,
        position,
    };

    ComplexMatrix m;
    std::string label;
    Kind kind{Kind::general};
    //! Built from a time-independent density (relevant for Hamiltonians).
    bool stationary{true};
    double dx{0};

    Eigen::Index size() const { return m.rows(); }

    ComplexField apply(ComplexField const& f) const { return m * f; }

    OperatorMatrix scaled(Complex c, std::string new_label) const
    {
        OperatorMatrix out = *this;
        out.m *= c;
        out.label = std::move(new_label);
        out.kind = Kind::general;
        return out;
    }
};

inline OperatorMatrix operator+(OperatorMatrix a, OperatorMatrix const& b)
{
    a.m += b.m;
    a.label = a.label + "+" + b.label;
    a.kind = OperatorMatrix::Kind::general;
    return a;
}

inline OperatorMatrix operator-(OperatorMatrix a, OperatorMatrix const& b)
{
    a.m -= b.m;
    a.label = a.label + "-" + b.label;
    a.kind = OperatorMatrix::Kind::general;
    return a;
}

namespace detail
{
//! Sparse copy when at most a small fraction of entries is nonzero.
inline bool mostly_zero(ComplexMatrix const& a)
{
    Eigen::Index nnz = 0;
    Eigen::Index limit = a.size() / 20;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < a.rows(); ++i)
        {
            if (a(i, j) != Complex(0) && ++nnz > limit)
                return false;
        }
    }
    return true;
}

inline ComplexMatrix product(ComplexMatrix const& a, ComplexMatrix const& b)
{
    if (mostly_zero(a))
    {
        Eigen::SparseMatrix<Complex> s = a.sparseView();
        return s * b;
    }
    if (mostly_zero(b))
    {
        Eigen::SparseMatrix<Complex> s = b.sparseView();
        return a * s;
    }
    return a * b;
}

//! [A, X] for the position operator X, entrywise A_ij (x_j - x_i).
inline ComplexMatrix commutator_with_position(ComplexMatrix const& a, double dx)
{
    ComplexMatrix out(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            out(i, j) = a(i, j) * (static_cast<double>(j - i) * dx);
    }
    return out;
}
}  // namespace detail

//! <tt>[A, B] = AB - BA</tt>.
inline OperatorMatrix commutator(OperatorMatrix const& a, OperatorMatrix const& b)
{
    if (a.size() != b.size())
        throw InvalidInput("commutator: dimension mismatch");
    OperatorMatrix out;
    out.label = "[" + a.label + "," + b.label + "]";
    out.dx = a.dx != 0 ? a.dx : b.dx;
    out.stationary = a.stationary && b.stationary;
    using K = OperatorMatrix::Kind;
    if (a.kind == K::position && b.kind == K::position)
        out.m = ComplexMatrix::Zero(a.size(), a.size());
    else if (b.kind == K::position)
        out.m = detail::commutator_with_position(a.m, b.dx);
    else if (a.kind == K::position)
        out.m = -detail::commutator_with_position(b.m, a.dx);
    else
        out.m = detail::product(a.m, b.m) - detail::product(b.m, a.m);
    return out;
}

//---------------------------------------------------------------------------//
// STENCIL MATRICES
//---------------------------------------------------------------------------//

//! Central first difference; second-order one-sided rows at both ends.
inline OperatorMatrix derivative_matrix(Grid1D const& grid)
{
    auto n = static_cast<Eigen::Index>(grid.size());
    double h = 1 / (2 * grid.dx());
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
    {
        d(i, i - 1) = -h;
        d(i, i + 1) = h;
    }
    d(0, 0) = -3 * h;
    d(0, 1) = 4 * h;
    d(0, 2) = -h;
    d(n - 1, n - 1) = 3 * h;
    d(n - 1, n - 2) = -4 * h;
    d(n - 1, n - 3) = h;
    return {d, "D", OperatorMatrix::Kind::general, true, grid.dx()};
}

//! Central second difference; four-point one-sided rows at both ends.
inline OperatorMatrix laplacian_matrix(Grid1D const& grid)
{
    auto n = static_cast<Eigen::Index>(grid.size());
    if (n < 4)
        throw InvalidInput("laplacian_matrix: need at least 4 nodes");
    double h = 1 / (grid.dx() * grid.dx());
    ComplexMatrix d = ComplexMatrix::Zero(n, n);
    for (Eigen::Index i = 1; i + 1 < n; ++i)
    {
        d(i, i - 1) = h;
        d(i, i) = -2 * h;
        d(i, i + 1) = h;
    }
    d(0, 0) = 2 * h;
    d(0, 1) = -5 * h;
    d(0, 2) = 4 * h;
    d(0, 3) = -h;
    d(n - 1, n - 1) = 2 * h;
    d(n - 1, n - 2) = -5 * h;
    d(n - 1, n - 3) = 4 * h;
    d(n - 1, n - 4) = -h;
    return {d, "Laplacian", OperatorMatrix::Kind::general, true, grid.dx()};
}

//! Multiplication by a nodal field.
inline OperatorMatrix multiplication_operator(Grid1D const& grid,
                                              ComplexField const& f,
                                              std::string label)
{
    require_size(grid, f.size(), "multiplication_operator");
    return {ComplexMatrix(f.asDiagonal()), std::move(label), OperatorMatrix::Kind::general,
            true, grid.dx()};
}

//---------------------------------------------------------------------------//
// INTERIOR RESIDUALS
//
// Boundary rows carry one-sided stencils; identities are asserted on rows
// 1 .. n-2 only.
//---------------------------------------------------------------------------//

template<class Derived>
double max_interior_abs(Eigen::MatrixBase<Derived> const& v)
{
    double m = 0;
    for (Eigen::Index i = 1; i + 1 < v.size(); ++i)
        m = std::max(m, std::abs(Complex(v[i])));
    return m;
}

inline double max_interior_rows_abs(ComplexMatrix const& a)
{
    double m = 0;
    for (Eigen::Index i = 1; i + 1 < a.rows(); ++i)
        m = std::max(m, a.row(i).cwiseAbs().maxCoeff());
    return m;
}

}  // namespace smlab
