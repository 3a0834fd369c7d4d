///
/// \file prony.hpp
///
/// Parameter estimation for real, conjugate-symmetric exponential sums
///
/// \f[
///   P(\omega) = \sum_{\ell=-M}^{M} \gamma_\ell e^{-i\omega\tau_\ell},
///   \quad \tau_{-\ell} = -\tau_\ell, \;
///   \gamma_{-\ell} = \overline{\gamma_\ell},
/// \f]
///
/// from equidistant samples \f$ P(hk) \f$: the classical Prony method, the
/// reduced variant exploiting the antisymmetry of the Prony polynomial, and
/// the approximate Prony method (APM) based on two singular vectors.
///
#ifndef SPARSE_PHASE_PRONY_HPP
#define SPARSE_PHASE_PRONY_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/numerics.hpp>

namespace sparse_phase
{
namespace prony
{

/// Roots farther than this from the unit circle are discarded by the
/// classical and reduced methods.
inline constexpr double unimodular_tolerance = 1e-6;

///
/// Monic Prony polynomial \f$ \Lambda(z) = \sum_k \lambda_k z^k \f$,
/// coefficients from low to high degree.
///
struct PronyPolynomial
{
    std::vector<double> coefficients;

    std::size_t degree() const noexcept
    {
        return coefficients.empty() ? 0 : coefficients.size() - 1;
    }
};

struct ApmConfig
{
    /// Upper bound on the number 2M + 1 of exponentials; also the degree of
    /// the two Prony polynomials.
    int L = 1;
    /// Admissible distance of a root modulus from one.
    double eps1 = 1e-5;
    /// Admissible distance between paired root angles.
    double eps2 = 1e-7;
    /// Coefficients with modulus at most this are dropped.
    double eps3 = 1e-10;
};

struct ApmDiagnostics
{
    double smallest_singular_value = 0.0;
    double second_singular_value = 0.0;
    std::size_t candidates_first = 0;  ///< roots kept from the 1st vector
    std::size_t candidates_second = 0; ///< roots kept from the 2nd vector
    std::size_t paired = 0;            ///< frequencies in [0, pi) found
    std::size_t deleted = 0;           ///< frequencies removed by eps3
};

struct ApmResult
{
    SymmetricExponentialSum sum;
    ApmDiagnostics diagnostics;
};

namespace detail
{

inline void check_samples(const IntensitySamples& samples)
{
    validate(samples);
}

///
/// Least-squares fit of the coefficients for the frequency set
/// \f$ \{-\tau_M, \ldots, -\tau_1, 0, \tau_1, \ldots, \tau_M\} \f$ (zero
/// only when `with_zero`), followed by conjugate symmetrisation
/// \f$ \gamma_\ell \leftarrow (\gamma_\ell + \overline{\gamma_{-\ell}})/2 \f$.
///
inline std::pair<double, std::vector<Complex>>
fit_symmetric(const IntensitySamples& samples, const std::vector<double>& taus,
              bool with_zero,
              const std::optional<RealVector>& weights = std::nullopt)
{
    const auto rows = static_cast<Index>(samples.size());
    const auto m = static_cast<Index>(taus.size());
    const Index zero_cols = with_zero ? 1 : 0;
    const Index cols = 2 * m + zero_cols;
    if (cols == 0)
    {
        return {0.0, {}};
    }
    if (rows < cols)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "too few samples for the coefficient fit");
    }
    DenseMatrix v(rows, cols);
    ComplexVector rhs(rows);
    for (Index k = 0; k < rows; ++k)
    {
        const double omega = samples.frequency(static_cast<std::size_t>(k));
        for (Index l = 0; l < m; ++l)
        {
            const double tau = taus[static_cast<std::size_t>(l)];
            // column l: +tau_l, column m + l: -tau_l
            v(k, l) = std::polar(1.0, -omega * tau);
            v(k, m + l) = std::polar(1.0, omega * tau);
        }
        if (with_zero)
        {
            v(k, 2 * m) = Complex(1.0, 0.0);
        }
        rhs(k) = samples.values[static_cast<std::size_t>(k)];
    }
    const auto ls = numerics::least_squares<Complex>(v, rhs, weights);
    const auto& g = ls.solution;
    std::vector<Complex> gammas(static_cast<std::size_t>(m));
    for (Index l = 0; l < m; ++l)
    {
        gammas[static_cast<std::size_t>(l)] =
            0.5 * (g(l) + std::conj(g(m + l)));
    }
    const double gamma0 = with_zero ? g(2 * m).real() : 0.0;
    return {gamma0, std::move(gammas)};
}

inline SymmetricExponentialSum
make_sum(double gamma0, const std::vector<double>& taus,
         const std::vector<Complex>& gammas)
{
    std::vector<ExponentialTerm> terms(taus.size());
    for (std::size_t i = 0; i < taus.size(); ++i)
    {
        terms[i] = {taus[i], gammas[i]};
    }
    return SymmetricExponentialSum(gamma0, std::move(terms));
}

///
/// Roots of a full-degree Prony polynomial to frequencies: keeps roots
/// within the unimodular tolerance, maps \f$ z = e^{-ih\tau} \f$ to
/// \f$ \tau = -\arg z / h \f$, splits them into the zero frequency and M
/// mirrored pairs and returns the symmetrised positive half
/// \f$ (\tau_\ell - \tau_{-\ell}) / 2 \f$.
///
inline std::vector<double> frequencies_from_roots(
    const std::vector<Complex>& roots, double step, std::size_t m_terms)
{
    std::vector<double> taus;
    for (const auto& z : roots)
    {
        if (std::abs(std::abs(z) - 1.0) <= unimodular_tolerance)
        {
            taus.push_back(-std::arg(z) / step);
        }
    }
    const std::size_t expected = 2 * m_terms + 1;
    if (taus.size() != expected)
    {
        throw Error(ErrorKind::RootCountMismatch,
                    "found " + std::to_string(taus.size()) +
                        " unimodular roots, expected " +
                        std::to_string(expected));
    }
    std::sort(taus.begin(), taus.end());
    // taus[m_terms] is the zero frequency; the halves mirror around it.
    std::vector<double> positive(m_terms);
    for (std::size_t l = 0; l < m_terms; ++l)
    {
        const double plus = taus[m_terms + 1 + l];
        const double minus = taus[m_terms - 1 - l];
        if (!(plus > 0.0) || !(minus < 0.0))
        {
            throw Error(ErrorKind::RootCountMismatch,
                        "unimodular roots are not conjugate-symmetric");
        }
        positive[l] = 0.5 * (plus - minus);
    }
    for (std::size_t l = 1; l < positive.size(); ++l)
    {
        if (!(positive[l - 1] < positive[l]))
        {
            throw Error(ErrorKind::SingularMatrix,
                        "duplicate frequencies recovered");
        }
    }
    return positive;
}

inline SymmetricExponentialSum
finish_from_polynomial(const IntensitySamples& samples,
                       const PronyPolynomial& poly, std::size_t m_terms)
{
    const auto roots = numerics::polynomial_roots(poly.coefficients);
    const auto taus = frequencies_from_roots(roots, samples.step, m_terms);
    const auto [gamma0, gammas] = fit_symmetric(samples, taus, true);
    return make_sum(gamma0, taus, gammas);
}

} // namespace detail

///
/// Prony polynomial from the square Hankel system
/// \f$ \sum_{k=0}^{n-1} \lambda_k P(h(k+m)) = -P(h(n+m)) \f$,
/// \f$ m = 0, \ldots, n-1 \f$, with \f$ n = 2M + 1 \f$.
///
inline PronyPolynomial classical_polynomial(const IntensitySamples& samples,
                                            std::size_t m_terms)
{
    const auto n = static_cast<Index>(2 * m_terms + 1);
    if (samples.size() < static_cast<std::size_t>(2 * n))
    {
        throw Error(ErrorKind::InvalidArgument,
                    "classical Prony needs at least 2(2M+1) samples");
    }
    const auto& p = samples.values;
    RealMatrix h(n, n);
    RealVector rhs(n);
    for (Index m = 0; m < n; ++m)
    {
        for (Index k = 0; k < n; ++k)
        {
            h(m, k) = p[static_cast<std::size_t>(k + m)];
        }
        rhs(m) = -p[static_cast<std::size_t>(n + m)];
    }
    const RealVector lambda = numerics::solve_square<double>(h, rhs);
    PronyPolynomial poly;
    poly.coefficients.assign(lambda.data(), lambda.data() + lambda.size());
    poly.coefficients.push_back(1.0);
    return poly;
}

///
/// Antisymmetric Prony polynomial (\f$ \lambda_{2M+1-k} = -\lambda_k \f$,
/// \f$ \lambda_0 = -1 \f$) from the real M x M system
///
/// \f[
///   \sum_{k=1}^{M} \lambda_k \left[ P(h(k+m)) - P(h(2M+1+m-k)) \right]
///   = P(hm) - P(h(2M+1+m)), \quad m = 0, \ldots, M-1,
/// \f]
///
/// which needs only the samples \f$ k = 0, \ldots, 3M \f$.
///
inline PronyPolynomial reduced_polynomial(const IntensitySamples& samples,
                                          std::size_t m_terms)
{
    if (samples.size() < 3 * m_terms + 1)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "reduced Prony needs at least 3M+1 samples");
    }
    const auto& p = samples.values;
    const std::size_t deg = 2 * m_terms + 1;
    PronyPolynomial poly;
    poly.coefficients.assign(deg + 1, 0.0);
    poly.coefficients[0] = -1.0;
    poly.coefficients[deg] = 1.0;
    if (m_terms > 0)
    {
        const auto mm = static_cast<Index>(m_terms);
        RealMatrix a(mm, mm);
        RealVector rhs(mm);
        for (Index m = 0; m < mm; ++m)
        {
            const auto mu = static_cast<std::size_t>(m);
            for (Index k = 1; k <= mm; ++k)
            {
                const auto ku = static_cast<std::size_t>(k);
                a(m, k - 1) = p[ku + mu] - p[deg + mu - ku];
            }
            rhs(m) = p[mu] - p[deg + mu];
        }
        const RealVector lambda = numerics::solve_square<double>(a, rhs);
        for (std::size_t k = 1; k <= m_terms; ++k)
        {
            const double v = lambda(static_cast<Index>(k - 1));
            poly.coefficients[k] = v;
            poly.coefficients[deg - k] = -v;
        }
    }
    return poly;
}

///
/// Classical Prony method for a sum with exactly 2M + 1 exponentials.
///
/// \pre `samples.size() >= 2 (2M + 1)` and \f$ h\tau_\ell \in (-\pi, \pi) \f$.
///
inline SymmetricExponentialSum classical_prony(const IntensitySamples& samples,
                                               std::size_t m_terms)
{
    detail::check_samples(samples);
    const auto poly = classical_polynomial(samples, m_terms);
    return detail::finish_from_polynomial(samples, poly, m_terms);
}

///
/// Prony method on the reduced antisymmetric system; exact data needs only
/// 3M + 1 samples. All provided samples enter the coefficient fit.
///
inline SymmetricExponentialSum reduced_prony(const IntensitySamples& samples,
                                             std::size_t m_terms)
{
    detail::check_samples(samples);
    const auto poly = reduced_polynomial(samples, m_terms);
    return detail::finish_from_polynomial(samples, poly, m_terms);
}

namespace detail
{

/// Angles in [0, pi) of the roots lying within eps1 of the unit circle.
inline std::vector<double> admissible_angles(const std::vector<Complex>& roots,
                                             double eps1)
{
    std::vector<double> out;
    for (const auto& z : roots)
    {
        if (std::abs(std::abs(z) - 1.0) > eps1)
        {
            continue;
        }
        const double w = std::arg(z);
        if (w >= 0.0 && w < std::numbers::pi)
        {
            out.push_back(w);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

///
/// One-to-one matching of two angle lists: candidate pairs within `eps2`
/// are accepted greedily by increasing distance; returns sorted averages.
///
inline std::vector<double> pair_angles(const std::vector<double>& first,
                                       const std::vector<double>& second,
                                       double eps2)
{
    struct Candidate
    {
        double distance;
        std::size_t i;
        std::size_t j;
    };
    std::vector<Candidate> candidates;
    for (std::size_t i = 0; i < first.size(); ++i)
    {
        // second is sorted; scan the window [first[i] - eps2, first[i] + eps2]
        auto it = std::lower_bound(second.begin(), second.end(),
                                   first[i] - eps2);
        for (; it != second.end() && *it <= first[i] + eps2; ++it)
        {
            const auto j = static_cast<std::size_t>(it - second.begin());
            candidates.push_back({std::abs(first[i] - *it), i, j});
        }
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& a, const Candidate& b) {
                  return a.distance < b.distance;
              });
    std::vector<bool> used_i(first.size(), false);
    std::vector<bool> used_j(second.size(), false);
    std::vector<double> out;
    for (const auto& c : candidates)
    {
        if (used_i[c.i] || used_j[c.j])
        {
            continue;
        }
        used_i[c.i] = true;
        used_j[c.j] = true;
        out.push_back(0.5 * (first[c.i] + second[c.j]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

///
/// ### Approximate Prony method
///
/// 1. Right singular vectors for the smallest and second smallest singular
///    values of the rectangular Hankel matrix
///    \f$ (P(h(k+m)))_{k,m=0}^{2\breve M - L, L} \f$, where the samples are
///    \f$ k = 0, \ldots, 2\breve M \f$.
/// 2. Roots of both degree-L polynomials, keeping those with
///    \f$ |\,|z| - 1| \le \varepsilon_1 \f$ and angle in \f$ [0, \pi) \f$.
/// 3. Frequencies as averages of angles paired within \f$ \varepsilon_2 \f$.
/// 4. Coefficients by weighted least squares over all samples; the weights
///    are the triangular window \f$ 1 - |k - \breve M| / (\breve M + 1) \f$.
/// 5. Terms with \f$ |\gamma| \le \varepsilon_3 \f$ are deleted and the fit
///    repeated on the survivors.
///
/// The number of exponentials does not need to be known; `L` must exceed
/// it for the two singular vectors to share the true roots.
///
inline ApmResult approximate_prony_detailed(const IntensitySamples& samples,
                                            const ApmConfig& config)
{
    detail::check_samples(samples);
    if (config.L < 1 || !(config.eps1 > 0.0) || !(config.eps2 > 0.0) ||
        !(config.eps3 > 0.0))
    {
        throw Error(ErrorKind::InvalidArgument,
                    "APM needs bound >= 1 and positive accuracies");
    }
    const auto bound = static_cast<Index>(config.L);
    const auto half =
        samples.size() == 0 ? Index{0}
                            : static_cast<Index>((samples.size() - 1) / 2);
    if (half < bound)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "APM needs at least 2L+1 samples");
    }

    const auto& p = samples.values;
    const Index rows = 2 * half - bound + 1;
    const Index cols = bound + 1;
    RealMatrix hankel(rows, cols);
    for (Index k = 0; k < rows; ++k)
    {
        for (Index m = 0; m < cols; ++m)
        {
            hankel(k, m) = p[static_cast<std::size_t>(k + m)];
        }
    }

    ApmResult result;
    auto& diag = result.diagnostics;
    const auto sv = numerics::smallest_right_singular_vectors(hankel, 2);
    diag.smallest_singular_value = sv.values[0];
    diag.second_singular_value = sv.values[1];

    const auto to_std = [](const RealVector& v) {
        return std::vector<double>(v.data(), v.data() + v.size());
    };
    const auto angles1 = detail::admissible_angles(
        numerics::polynomial_roots(to_std(sv.vectors[0])), config.eps1);
    const auto angles2 = detail::admissible_angles(
        numerics::polynomial_roots(to_std(sv.vectors[1])), config.eps1);
    diag.candidates_first = angles1.size();
    diag.candidates_second = angles2.size();

    const auto omegas = detail::pair_angles(angles1, angles2, config.eps2);
    diag.paired = omegas.size();

    bool with_zero = false;
    std::vector<double> taus;
    for (double w : omegas)
    {
        if (w == 0.0)
        {
            with_zero = true;
        }
        else
        {
            const double tau = w / samples.step;
            if (taus.empty() || taus.back() < tau)
            {
                taus.push_back(tau);
            }
        }
    }

    RealVector window(static_cast<Index>(samples.size()));
    for (Index k = 0; k < window.size(); ++k)
    {
        window(k) = 1.0 - static_cast<double>(std::abs(k - half)) /
                              static_cast<double>(half + 1);
    }

    double gamma0 = 0.0;
    std::vector<Complex> gammas;
    std::tie(gamma0, gammas) =
        detail::fit_symmetric(samples, taus, with_zero, window);

    std::vector<double> kept_taus;
    for (std::size_t l = 0; l < taus.size(); ++l)
    {
        if (std::abs(gammas[l]) > config.eps3)
        {
            kept_taus.push_back(taus[l]);
        }
    }
    bool keep_zero = with_zero && std::abs(gamma0) > config.eps3;
    diag.deleted = taus.size() - kept_taus.size() +
                   ((with_zero && !keep_zero) ? 1 : 0);
    if (kept_taus.empty() && !keep_zero)
    {
        throw Error(ErrorKind::EmptyModel,
                    "no frequency survived the APM filters");
    }
    if (diag.deleted > 0)
    {
        std::tie(gamma0, gammas) =
            detail::fit_symmetric(samples, kept_taus, keep_zero, window);
    }
    result.sum = detail::make_sum(gamma0, kept_taus, gammas);
    return result;
}

inline SymmetricExponentialSum approximate_prony(const IntensitySamples& samples,
                                                 const ApmConfig& config)
{
    return approximate_prony_detailed(samples, config).sum;
}

///
/// Number of knots K with \f$ K(K-1)/2 \f$ equal to the number of positive
/// frequencies. Throws NotTriangular when no such K exists.
///
inline std::size_t infer_support_size(std::size_t positive_terms)
{
    const auto k = static_cast<std::size_t>(
        std::llround((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(
                                                      positive_terms))) /
                     2.0));
    if (k * (k - 1) / 2 != positive_terms)
    {
        throw Error(ErrorKind::NotTriangular,
                    std::to_string(positive_terms) +
                        " frequencies is not a triangular number");
    }
    return k;
}

/// \f$ \max_k |P_{rec}(hk) - P_k| / \max_k |P_k| \f$.
inline double relative_residual(const SymmetricExponentialSum& sum,
                                const IntensitySamples& samples)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        const double v = samples.values[k];
        num = std::max(num, std::abs(sum(samples.frequency(k)) - v));
        den = std::max(den, std::abs(v));
    }
    return den > 0.0 ? num / den : num;
}

} // namespace prony
} // namespace sparse_phase

#endif /* SPARSE_PHASE_PRONY_HPP */
