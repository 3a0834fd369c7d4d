///
/// \file numerics.hpp
///
/// Dense linear-algebra and root-finding kernels used by the Prony stage
/// and by coefficient lifting. All routines are templated on the scalar
/// type (`double` or `std::complex<double>`).
///
#ifndef SPARSE_PHASE_NUMERICS_HPP
#define SPARSE_PHASE_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <type_traits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>

namespace sparse_phase
{

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseMatrix = Matrix<Complex>;
using ComplexVector = Vector<Complex>;
using RealMatrix = Matrix<double>;
using RealVector = Vector<double>;

namespace numerics
{

/// Module defaults; every routine accepts overrides.
struct Tolerances
{
    /// Trailing polynomial coefficients below `trim * max|c|` are dropped.
    double trim = 1e-14;
    /// Numerical rank cut-off relative to the largest singular value.
    double rank = 1e-10;
    /// Largest admissible condition estimate for square solves.
    double max_condition = 1e14;
};

template <typename Scalar>
struct SingularPairs
{
    /// Singular values, smallest first.
    std::vector<double> values;
    /// Unit-norm right singular vectors matching `values`.
    std::vector<Vector<Scalar>> vectors;
};

///
/// Right singular vectors for the `count` smallest singular values of `a`,
/// ordered smallest first.
///
/// When `a` has fewer rows than columns the trailing columns of the full
/// right factor span the null space and carry singular value zero.
///
/// \pre `count` is 1 or 2 and `a.cols() >= count`.
///
template <typename Derived>
SingularPairs<typename Derived::Scalar>
smallest_right_singular_vectors(const Eigen::MatrixBase<Derived>& a,
                                int count)
{
    using Scalar = typename Derived::Scalar;
    if (count < 1 || count > 2)
    {
        throw Error(ErrorKind::InvalidArgument, "count must be 1 or 2");
    }
    if (a.rows() == 0 || a.cols() < count)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "matrix is empty or has too few columns");
    }
    const Matrix<Scalar> work = a;
    Eigen::BDCSVD<Matrix<Scalar>> svd(work, Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
    {
        throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
    }
    const auto& sigma = svd.singularValues();
    const auto& v = svd.matrixV();
    const Index n = v.cols();

    SingularPairs<Scalar> result;
    for (int k = 0; k < count; ++k)
    {
        const Index col = n - 1 - k;
        result.values.push_back(col < sigma.size() ? sigma(col) : 0.0);
        result.vectors.push_back(v.col(col));
    }
    return result;
}

namespace detail
{

///
/// Diagonal similarity scaling by powers of two that equalises row and
/// column norms (the classical Parlett-Reinsch balancing sweep).
///
template <typename Scalar>
void balance(Matrix<Scalar>& m)
{
    constexpr double radix = 2.0;
    constexpr double radix2 = radix * radix;
    const Index n = m.rows();
    bool converged = false;
    while (!converged)
    {
        converged = true;
        for (Index i = 0; i < n; ++i)
        {
            double c = 0.0;
            double r = 0.0;
            for (Index j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    c += std::abs(m(j, i));
                    r += std::abs(m(i, j));
                }
            }
            if (c == 0.0 || r == 0.0)
            {
                continue;
            }
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g)
            {
                f *= radix;
                c *= radix2;
            }
            g = r * radix;
            while (c > g)
            {
                f /= radix;
                c /= radix2;
            }
            if ((c + r) / f < 0.95 * s)
            {
                converged = false;
                m.row(i) /= f;
                m.col(i) *= f;
            }
        }
    }
}

/// \f$ \sum_k c_k z^k \f$ by Horner's rule.
inline Complex horner(const std::vector<Complex>& c, Complex z)
{
    Complex acc(0.0, 0.0);
    for (auto it = c.rbegin(); it != c.rend(); ++it)
    {
        acc = acc * z + *it;
    }
    return acc;
}

} // namespace detail

///
/// All roots (with multiplicity) of \f$ p(z) = \sum_k c_k z^k \f$, given
/// coefficients from low to high degree, as eigenvalues of the balanced
/// companion matrix.
///
/// Real coefficients use the real Hessenberg QR so that real roots come out
/// with an exactly zero imaginary part and complex roots in exact
/// conjugate pairs.
///
template <typename Scalar>
std::vector<Complex> polynomial_roots(const std::vector<Scalar>& coefficients,
                                      const Tolerances& tol = {})
{
    double cmax = 0.0;
    for (const auto& c : coefficients)
    {
        cmax = std::max(cmax, std::abs(c));
    }
    if (!(cmax > 0.0))
    {
        throw Error(ErrorKind::DegenerateInput, "all coefficients vanish");
    }
    std::size_t len = coefficients.size();
    while (len > 0 && std::abs(coefficients[len - 1]) <= tol.trim * cmax)
    {
        --len;
    }
    if (len < 2)
    {
        throw Error(ErrorKind::DegenerateInput,
                    "polynomial degree is zero after trimming");
    }
    const auto degree = static_cast<Index>(len - 1);
    const Scalar lead = coefficients[len - 1];

    Matrix<Scalar> companion = Matrix<Scalar>::Zero(degree, degree);
    for (Index i = 1; i < degree; ++i)
    {
        companion(i, i - 1) = Scalar(1);
    }
    for (Index i = 0; i < degree; ++i)
    {
        companion(i, degree - 1) =
            -coefficients[static_cast<std::size_t>(i)] / lead;
    }
    detail::balance(companion);

    std::vector<Complex> roots(static_cast<std::size_t>(degree));
    if constexpr (std::is_same_v<Scalar, double>)
    {
        Eigen::EigenSolver<Matrix<double>> es(companion, false);
        if (es.info() != Eigen::Success)
        {
            throw Error(ErrorKind::NumericalFailure,
                        "companion eigenvalues did not converge");
        }
        for (Index i = 0; i < degree; ++i)
        {
            roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        }
    }
    else
    {
        Eigen::ComplexEigenSolver<Matrix<Complex>> es(companion, false);
        if (es.info() != Eigen::Success)
        {
            throw Error(ErrorKind::NumericalFailure,
                        "companion eigenvalues did not converge");
        }
        for (Index i = 0; i < degree; ++i)
        {
            roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
        }
    }
    return roots;
}

/// Coefficients (low to high) of \f$ \prod_j (z - r_j) \f$.
inline std::vector<Complex> polynomial_from_roots(
    const std::vector<Complex>& roots)
{
    std::vector<Complex> c{Complex(1.0, 0.0)};
    for (const auto& r : roots)
    {
        std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
        for (std::size_t k = 0; k < c.size(); ++k)
        {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return c;
}

template <typename Scalar>
struct LeastSquaresResult
{
    Vector<Scalar> solution;
    /// \f$ \| W (A x - b) \|_2 \f$
    double residual_norm = 0.0;
};

///
/// Minimiser of \f$ \| W (A x - b) \|_2 \f$ via SVD, with \f$ W \f$ the
/// optional diagonal row weighting (identity when absent).
///
/// Throws RankDeficient when the smallest singular value of \f$ W A \f$ is
/// below `tol.rank` times the largest.
///
template <typename Scalar>
LeastSquaresResult<Scalar>
least_squares(const Matrix<Scalar>& a, const Vector<Scalar>& b,
              const std::optional<RealVector>& preconditioner = std::nullopt,
              const Tolerances& tol = {})
{
    if (a.rows() < a.cols() || a.cols() == 0)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "least squares needs rows >= cols >= 1");
    }
    if (b.size() != a.rows())
    {
        throw Error(ErrorKind::InvalidArgument,
                    "right-hand side length differs from row count");
    }
    Matrix<Scalar> wa = a;
    Vector<Scalar> wb = b;
    if (preconditioner)
    {
        if (preconditioner->size() != a.rows())
        {
            throw Error(ErrorKind::InvalidArgument,
                        "preconditioner length differs from row count");
        }
        for (Index i = 0; i < a.rows(); ++i)
        {
            wa.row(i) *= (*preconditioner)(i);
            wb(i) *= (*preconditioner)(i);
        }
    }
    Eigen::BDCSVD<Matrix<Scalar>> svd(wa, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
    {
        throw Error(ErrorKind::NumericalFailure, "SVD did not converge");
    }
    const auto& sigma = svd.singularValues();
    const double smax = sigma(0);
    const double smin = sigma(sigma.size() - 1);
    if (!(smax > 0.0) || smin < tol.rank * smax)
    {
        throw Error(ErrorKind::RankDeficient,
                    "numerical rank below column count (sigma_min/sigma_max "
                    "= " + std::to_string(smax > 0.0 ? smin / smax : 0.0) +
                        ")");
    }
    LeastSquaresResult<Scalar> out;
    out.solution = svd.solve(wb);
    out.residual_norm = (wa * out.solution - wb).norm();
    return out;
}

///
/// Solution of the square system \f$ A x = b \f$ by partially pivoted LU,
/// refined once. Throws SingularMatrix when the reciprocal condition
/// estimate falls below `1 / tol.max_condition`.
///
template <typename Scalar>
Vector<Scalar> solve_square(const Matrix<Scalar>& a, const Vector<Scalar>& b,
                            const Tolerances& tol = {})
{
    if (a.rows() != a.cols() || a.rows() == 0)
    {
        throw Error(ErrorKind::InvalidArgument, "matrix is not square");
    }
    if (b.size() != a.rows())
    {
        throw Error(ErrorKind::InvalidArgument,
                    "right-hand side length differs from matrix size");
    }
    Eigen::PartialPivLU<Matrix<Scalar>> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || !std::isfinite(rcond) ||
        1.0 / rcond > tol.max_condition)
    {
        throw Error(ErrorKind::SingularMatrix,
                    "condition estimate exceeds limit (rcond = " +
                        std::to_string(rcond) + ")");
    }
    Vector<Scalar> x = lu.solve(b);
    const Vector<Scalar> r = b - a * x;
    x += lu.solve(r);
    return x;
}

} // namespace numerics
} // namespace sparse_phase

#endif /* SPARSE_PHASE_NUMERICS_HPP */
