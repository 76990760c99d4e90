#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace smlab
{
//---------------------------------------------------------------------------//
/*!
 * Tridiagonal system in (lower, diagonal, upper) storage.
 *
 * Row \c i reads <tt>lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1]</tt>;
 * \c lower[0] and \c upper[n-1] are ignored.
 */
template<class T>
struct Tridiagonal
{
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    Vec lower;
    Vec diag;
    Vec upper;

    explicit Tridiagonal(Eigen::Index n)
        : lower(Vec::Zero(n)), diag(Vec::Zero(n)), upper(Vec::Zero(n))
    {
    }

    Eigen::Index size() const { return diag.size(); }

    Vec apply(Vec const& x) const
    {
        Eigen::Index n = this->size();
        Vec y(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            T v = diag[i] * x[i];
            if (i > 0)
                v += lower[i] * x[i - 1];
            if (i + 1 < n)
                v += upper[i] * x[i + 1];
            y[i] = v;
        }
        return y;
    }
};

//---------------------------------------------------------------------------//
/*!
 * LU factorization without pivoting (Thomas algorithm).
 *
 * Construction returns \c std::nullopt on a vanishing or non-finite pivot so
 * that callers can attach their own context to the failure.
 */
template<class T>
class TridiagonalLU
{
  public:
    using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

    static std::optional<TridiagonalLU> factor(Tridiagonal<T> const& a)
    {
        TridiagonalLU lu;
        Eigen::Index n = a.size();
        lu.lower_ = a.lower;
        lu.upper_ = a.upper;
        lu.pivot_ = Vec(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            T p = a.diag[i];
            if (i > 0)
                p -= a.lower[i] * lu.upper_[i - 1] / lu.pivot_[i - 1];
            double mag = std::abs(p);
            if (!(mag > 1e-300) || !std::isfinite(mag))
                return std::nullopt;
            lu.pivot_[i] = p;
        }
        return lu;
    }

    Vec solve(Vec const& rhs) const
    {
        Eigen::Index n = pivot_.size();
        Vec y(n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            T v = rhs[i];
            if (i > 0)
                v -= lower_[i] * y[i - 1] / pivot_[i - 1];
            y[i] = v;
        }
        Vec x(n);
        for (Eigen::Index i = n - 1; i >= 0; --i)
        {
            T v = y[i];
            if (i + 1 < n)
                v -= upper_[i] * x[i + 1];
            x[i] = v / pivot_[i];
        }
        return x;
    }

  private:
    TridiagonalLU() = default;

    Vec lower_;
    Vec upper_;
    Vec pivot_;
};

}  // namespace smlab
