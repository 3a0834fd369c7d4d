///
/// \file splines.hpp
///
/// B-splines on strictly increasing knots, the derivative recursion for
/// spline coefficients, and its inverse (coefficient lifting).
///
/// Knot and coefficient indices are zero-based throughout: `knots[0]` is the
/// first knot and `B(j, m)` is supported on `[knots[j], knots[j + m])`.
///
#ifndef SPARSE_PHASE_SPLINES_HPP
#define SPARSE_PHASE_SPLINES_HPP

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/numerics.hpp>

namespace sparse_phase
{
namespace splines
{

///
/// \f$ B_{j,m}(t) \f$ by the Cox-de Boor recursion, with the half-open base
/// case \f$ B_{j,1} = \mathbf{1}_{[T_j, T_{j+1})} \f$. The right end of the
/// support therefore evaluates to zero.
///
/// \pre `m >= 1` and `j + m < knots.size()`.
///
inline double bspline_value(const std::vector<double>& knots, std::size_t j,
                            int m, double t)
{
    if (m < 1 || j + static_cast<std::size_t>(m) >= knots.size())
    {
        throw Error(ErrorKind::InvalidArgument,
                    "B-spline index or order out of range");
    }
    const auto order = static_cast<std::size_t>(m);
    if (t < knots[j] || t >= knots[j + order])
    {
        return 0.0;
    }
    // b[i] holds B_{j+i,p}(t) for the current order p.
    std::vector<double> b(order, 0.0);
    for (std::size_t i = 0; i < order; ++i)
    {
        b[i] = (knots[j + i] <= t && t < knots[j + i + 1]) ? 1.0 : 0.0;
    }
    for (std::size_t p = 2; p <= order; ++p)
    {
        for (std::size_t i = 0; i + p <= order; ++i)
        {
            const double tl = knots[j + i];
            const double tr = knots[j + i + p];
            const double left =
                (t - tl) / (knots[j + i + p - 1] - tl) * b[i];
            const double right =
                (tr - t) / (tr - knots[j + i + 1]) * b[i + 1];
            b[i] = left + right;
        }
    }
    return b[0];
}

/// \f$ f(t) = \sum_j c_j B_{j,m}(t) \f$ for a validated spline.
inline Complex spline_value(const SplineSignal& signal, double t)
{
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < signal.coefficients.size(); ++j)
    {
        const double b = bspline_value(signal.knots, j, signal.order, t);
        if (b != 0.0)
        {
            acc += signal.coefficients[j] * b;
        }
    }
    return acc;
}

/// \f$ \int f = \sum_j c_j (T_{j+m} - T_j) / m \f$.
inline Complex spline_integral(const SplineSignal& signal)
{
    const auto m = static_cast<std::size_t>(signal.order);
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < signal.coefficients.size(); ++j)
    {
        acc += signal.coefficients[j] *
               ((signal.knots[j + m] - signal.knots[j]) /
                static_cast<double>(m));
    }
    return acc;
}

///
/// Coefficients of all derivatives of an order-m spline.
///
/// `levels[k]` holds \f$ c^{(m-k)} \f$ (length N + k), so `levels[0]` are the
/// spline's own coefficients, `levels[k]` for `0 < k < m` are the
/// coefficients of the order-(m - k) spline \f$ f^{(k)} \f$, and
/// `levels[m]` are the Dirac weights \f$ c^{(0)} \f$ of the distributional
/// derivative \f$ f^{(m)} \f$.
///
struct CoefficientLadder
{
    int order = 1;
    std::vector<double> knots;
    std::vector<std::vector<Complex>> levels;

    const std::vector<Complex>& distributional() const
    {
        return levels.back();
    }

    /// Spline of order m - k representing the k-th derivative, 0 <= k < m.
    /// It lives on the full knot vector (N + k coefficients, order m - k).
    SplineSignal derivative(int k) const
    {
        return SplineSignal{order - k, knots,
                            levels[static_cast<std::size_t>(k)]};
    }
};

namespace detail
{

inline void check_ladder_input(int m, const std::vector<double>& knots,
                               std::size_t coefficient_count)
{
    if (m < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    }
    if (knots.size() != coefficient_count + static_cast<std::size_t>(m))
    {
        throw Error(ErrorKind::InvalidArgument,
                    "knot count must equal coefficient count + order");
    }
    sparse_phase::detail::check_knots(knots);
}

} // namespace detail

///
/// Apply the derivative recursion
///
/// \f[
///   c_j^{(m-k)} = (m-k) \frac{c_j^{(m-k+1)} - c_{j-1}^{(m-k+1)}}
///                            {T_{j+m-k} - T_j}
/// \f]
///
/// down to the Dirac weights \f$ c^{(0)}_j = c^{(1)}_j - c^{(1)}_{j-1} \f$,
/// with zero padding at both ends of each level.
///
inline CoefficientLadder differentiate_ladder(int m,
                                              const std::vector<double>& knots,
                                              const std::vector<Complex>& cm)
{
    detail::check_ladder_input(m, knots, cm.size());
    CoefficientLadder ladder;
    ladder.order = m;
    ladder.knots = knots;
    ladder.levels.reserve(static_cast<std::size_t>(m) + 1);
    ladder.levels.push_back(cm);
    for (int k = 1; k <= m; ++k)
    {
        const auto& upper = ladder.levels.back();
        const std::size_t len = upper.size() + 1;
        const auto p = static_cast<std::size_t>(m - k);
        std::vector<Complex> level(len);
        for (std::size_t j = 0; j < len; ++j)
        {
            const Complex hi = j < upper.size() ? upper[j] : Complex(0.0);
            const Complex lo = j > 0 ? upper[j - 1] : Complex(0.0);
            if (p == 0)
            {
                level[j] = hi - lo;
            }
            else
            {
                level[j] = static_cast<double>(p) * (hi - lo) /
                           (knots[j + p] - knots[j]);
            }
        }
        ladder.levels.push_back(std::move(level));
    }
    return ladder;
}

///
/// The stacked product \f$ C^{(0)} C^{(1)} \cdots C^{(m-1)} \f$ mapping
/// \f$ c^{(m)} \f$ to \f$ c^{(0)} \f$; shape (N + m) x N.
///
inline RealMatrix lifting_matrix(int m, const std::vector<double>& knots)
{
    const auto total = static_cast<Index>(knots.size());
    RealMatrix product;
    for (int p = 0; p < m; ++p)
    {
        // C^(p) maps a level of length total - p - 1 to one of length
        // total - p.
        const Index rows = total - p;
        const Index cols = rows - 1;
        RealMatrix c = RealMatrix::Zero(rows, cols);
        for (Index j = 0; j < rows; ++j)
        {
            double scale = 1.0;
            if (p > 0)
            {
                scale = static_cast<double>(p) /
                        (knots[static_cast<std::size_t>(j + p)] -
                         knots[static_cast<std::size_t>(j)]);
            }
            if (j < cols)
            {
                c(j, j) = scale;
            }
            if (j > 0)
            {
                c(j, j - 1) = -scale;
            }
        }
        product = (p == 0) ? c : RealMatrix(product * c);
    }
    return product;
}

struct LiftResult
{
    std::vector<Complex> coefficients;
    /// \f$ \| A c^{(m)} - c^{(0)} \| / \| c^{(0)} \| \f$
    double relative_residual = 0.0;
};

///
/// Least-squares solution \f$ c^{(m)} \f$ of the over-determined system
/// \f$ C^{(0)} \cdots C^{(m-1)} c^{(m)} = c^{(0)} \f$.
///
/// Throws InconsistentSystem when the relative residual exceeds
/// `tolerance`, i.e. when `c0` is not the distributional m-th derivative of
/// any order-m spline on these knots.
///
inline LiftResult lift_coefficients(int m, const std::vector<double>& knots,
                                    const std::vector<Complex>& c0,
                                    double tolerance = 1e-6)
{
    if (m < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "order must be >= 1");
    }
    if (c0.size() != knots.size() ||
        knots.size() <= static_cast<std::size_t>(m))
    {
        throw Error(ErrorKind::InvalidArgument,
                    "c0 length must equal knot count and exceed order");
    }
    sparse_phase::detail::check_knots(knots);

    const DenseMatrix a = lifting_matrix(m, knots).cast<Complex>();
    ComplexVector b(static_cast<Index>(c0.size()));
    for (std::size_t i = 0; i < c0.size(); ++i)
    {
        b(static_cast<Index>(i)) = c0[i];
    }
    const auto ls = numerics::least_squares<Complex>(a, b);

    LiftResult out;
    out.coefficients.assign(ls.solution.data(),
                            ls.solution.data() + ls.solution.size());
    const double bnorm = b.norm();
    out.relative_residual = bnorm > 0.0 ? ls.residual_norm / bnorm : 0.0;
    if (out.relative_residual > tolerance)
    {
        throw Error(ErrorKind::InconsistentSystem,
                    "relative residual " +
                        std::to_string(out.relative_residual) +
                        " exceeds tolerance");
    }
    return out;
}

} // namespace splines
} // namespace sparse_phase

#endif /* SPARSE_PHASE_SPLINES_HPP */
