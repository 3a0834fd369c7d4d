///
/// \file model.hpp
///
/// Signal models, the conjugate-symmetric exponential sum describing a
/// squared Fourier intensity, sample containers and pipeline configuration.
///
#ifndef SPARSE_PHASE_MODEL_HPP
#define SPARSE_PHASE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <sparse_phase/error.hpp>

namespace sparse_phase
{

using Complex = std::complex<double>;

///
/// Weighted Dirac train \f$ f(t) = \sum_j c_j \delta(t - T_j) \f$.
///
struct SpikeSignal
{
    std::vector<double> knots;
    std::vector<Complex> coefficients;

    friend bool operator==(const SpikeSignal&, const SpikeSignal&) = default;
};

///
/// Spline \f$ f(t) = \sum_{j=1}^{N} c_j B_{j,m}(t) \f$ of order `order` on
/// `N + order` strictly increasing knots.
///
struct SplineSignal
{
    int order = 1;
    std::vector<double> knots;
    std::vector<Complex> coefficients;

    friend bool operator==(const SplineSignal&, const SplineSignal&) = default;
};

using Signal = std::variant<SpikeSignal, SplineSignal>;

/// One positive-frequency term \f$ \gamma e^{-i\omega\tau} \f$ of a
/// symmetric exponential sum.
struct ExponentialTerm
{
    double tau;
    Complex gamma;

    friend bool operator==(const ExponentialTerm&,
                           const ExponentialTerm&) = default;
};

///
/// ### SymmetricExponentialSum
///
/// Real-valued exponential sum
///
/// \f[
///   P(\omega) = \gamma_0 + \sum_{\ell=1}^{M} \left( \gamma_\ell
///   e^{-i\omega\tau_\ell} + \overline{\gamma_\ell} e^{i\omega\tau_\ell}
///   \right).
/// \f]
///
/// Only the zero frequency and the positive half are stored; the negative
/// half follows from \f$ \tau_{-\ell} = -\tau_\ell \f$,
/// \f$ \gamma_{-\ell} = \overline{\gamma_\ell} \f$. Frequencies are kept
/// strictly increasing and positive.
///
class SymmetricExponentialSum
{
public:
    SymmetricExponentialSum() = default;

    SymmetricExponentialSum(double gamma0, std::vector<ExponentialTerm> terms)
        : m_gamma0(gamma0), m_terms(std::move(terms))
    {
        if (!std::isfinite(m_gamma0))
        {
            throw Error(ErrorKind::InvalidArgument, "gamma0 is not finite");
        }
        for (std::size_t i = 0; i < m_terms.size(); ++i)
        {
            const auto& t = m_terms[i];
            if (!std::isfinite(t.tau) || !(t.tau > 0.0))
            {
                throw Error(ErrorKind::InvalidArgument,
                            "frequency " + std::to_string(i) +
                                " is not finite and positive");
            }
            if (!std::isfinite(t.gamma.real()) ||
                !std::isfinite(t.gamma.imag()))
            {
                throw Error(ErrorKind::InvalidArgument,
                            "coefficient " + std::to_string(i) +
                                " is not finite");
            }
            if (i > 0 && !(m_terms[i - 1].tau < t.tau))
            {
                throw Error(ErrorKind::InvalidArgument,
                            "frequencies are not strictly increasing");
            }
        }
    }

    double gamma0() const noexcept
    {
        return m_gamma0;
    }

    const std::vector<ExponentialTerm>& terms() const noexcept
    {
        return m_terms;
    }

    std::size_t positive_term_count() const noexcept
    {
        return m_terms.size();
    }

    /// Total number of exponentials including the negative half and zero.
    std::size_t full_term_count() const noexcept
    {
        return 2 * m_terms.size() + 1;
    }

    /// \f$ P(\omega) \f$ using \f$ 2\,\mathrm{Re}(\gamma e^{-i\omega\tau}) \f$.
    double operator()(double omega) const
    {
        double acc = m_gamma0;
        for (const auto& t : m_terms)
        {
            acc += 2.0 * std::real(t.gamma * std::polar(1.0, -omega * t.tau));
        }
        return acc;
    }

    /// Sum over all \f$ 2M + 1 \f$ exponentials without using symmetry.
    Complex evaluate_full(double omega) const
    {
        Complex acc(m_gamma0, 0.0);
        for (const auto& t : m_terms)
        {
            acc += t.gamma * std::polar(1.0, -omega * t.tau);
            acc += std::conj(t.gamma) * std::polar(1.0, omega * t.tau);
        }
        return acc;
    }

    friend bool operator==(const SymmetricExponentialSum&,
                           const SymmetricExponentialSum&) = default;

private:
    double m_gamma0 = 0.0;
    std::vector<ExponentialTerm> m_terms;
};

enum class SampleKind
{
    Magnitude,          ///< \f$ |\hat f(hk)| \f$
    Squared,            ///< \f$ |\hat f(hk)|^2 \f$
    DerivativeWeighted, ///< \f$ (hk)^{2m} |\hat f(hk)|^2 \f$
};

///
/// Equidistant intensity samples; `values[k]` belongs to frequency
/// \f$ \omega = h k \f$.
///
struct IntensitySamples
{
    double step = 1.0;
    std::vector<double> values;
    SampleKind kind = SampleKind::Magnitude;

    double frequency(std::size_t k) const noexcept
    {
        return step * static_cast<double>(k);
    }

    std::size_t size() const noexcept
    {
        return values.size();
    }
};

inline void validate(const IntensitySamples& samples)
{
    if (!std::isfinite(samples.step) || !(samples.step > 0.0))
    {
        throw Error(ErrorKind::InvalidArgument, "step must be positive");
    }
    for (std::size_t k = 0; k < samples.values.size(); ++k)
    {
        const double v = samples.values[k];
        if (!std::isfinite(v) || v < 0.0)
        {
            throw Error(ErrorKind::InvalidArgument,
                        "sample " + std::to_string(k) +
                            " is negative or not finite");
        }
    }
}

///
/// Inputs of the phase retrieval pipeline. `upper_bound` bounds the number
/// of knots (N + m); `eps` is the knot-matching tolerance and `eps1`..`eps3`
/// drive the approximate Prony method.
///
struct RecoveryConfig
{
    int order = 0;
    int upper_bound = 2;
    double eps = 1e-3;
    double eps1 = 1e-5;
    double eps2 = 1e-7;
    double eps3 = 1e-10;
    /// Relative residual above which lifting c^(0) to c^(m) is rejected.
    double lifting_tolerance = 1e-6;
    /// Relative margin below which the two placement hypotheses are a tie.
    double tie_margin = 1e-6;
};

inline void validate(const RecoveryConfig& config)
{
    if (config.order < 0)
    {
        throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
    }
    if (config.upper_bound < 2)
    {
        throw Error(ErrorKind::InvalidArgument, "bound must be >= 2");
    }
    const double tols[] = {config.eps, config.eps1, config.eps2, config.eps3,
                           config.lifting_tolerance, config.tie_margin};
    for (double t : tols)
    {
        if (!std::isfinite(t) || !(t > 0.0))
        {
            throw Error(ErrorKind::InvalidArgument,
                        "tolerances must be positive");
        }
    }
}

struct RecoveryResiduals
{
    /// max_k |P_rec(hk) - P(hk)| / max_k |P(hk)| after the Prony stage.
    double apm = 0.0;
    /// Zero-frequency coefficient of the recovered sum.
    double gamma0 = 0.0;
    /// |gamma0 - sum_j |c_j^(0)|^2|.
    double gamma0_gap = 0.0;
    /// Relative residual of the coefficient lifting system (0 when m = 0).
    double lifting = 0.0;
    /// Relative mismatch between the recovered signal's weighted
    /// intensities and the input; diagnostic only.
    double intensity = 0.0;
};

struct RecoveryReport
{
    int order = 0;
    std::vector<double> knots;
    std::vector<Complex> c0;
    /// Order-m coefficients; empty for spikes.
    std::vector<Complex> cm;
    std::size_t positive_terms = 0;
    RecoveryResiduals residuals;
    std::vector<std::string> warnings;

    /// The recovered signal in model form.
    Signal signal() const
    {
        if (order == 0)
        {
            return SpikeSignal{knots, c0};
        }
        return SplineSignal{order, knots, cm};
    }
};

///
/// Outcome of checking a signal against the uniqueness hypotheses. The
/// flags are advisory; recovery may still be attempted.
///
struct ValidationReport
{
    bool difference_collision = false;
    bool endpoint_modulus_tie = false;
    std::vector<std::string> warnings;

    bool clean() const noexcept
    {
        return !difference_collision && !endpoint_modulus_tie;
    }
};

namespace detail
{

inline void check_knots(const std::vector<double>& knots)
{
    for (std::size_t i = 0; i < knots.size(); ++i)
    {
        if (!std::isfinite(knots[i]))
        {
            throw Error(ErrorKind::InvalidSignal,
                        "knot " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(knots[i - 1] < knots[i]))
        {
            throw Error(ErrorKind::InvalidSignal,
                        "knots are not strictly increasing at index " +
                            std::to_string(i));
        }
    }
}

inline void check_finite(const std::vector<Complex>& coefficients)
{
    for (std::size_t i = 0; i < coefficients.size(); ++i)
    {
        const auto c = coefficients[i];
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        {
            throw Error(ErrorKind::InvalidSignal,
                        "coefficient " + std::to_string(i) +
                            " is not finite");
        }
    }
}

/// True if two pairwise knot differences agree within 1e-12 of the span.
inline bool has_difference_collision(const std::vector<double>& knots)
{
    const std::size_t n = knots.size();
    if (n < 3)
    {
        return false;
    }
    std::vector<double> diffs;
    diffs.reserve(n * (n - 1) / 2);
    for (std::size_t j = 1; j < n; ++j)
    {
        for (std::size_t k = 0; k < j; ++k)
        {
            diffs.push_back(knots[j] - knots[k]);
        }
    }
    std::sort(diffs.begin(), diffs.end());
    const double tol = 1e-12 * (knots.back() - knots.front());
    for (std::size_t i = 1; i < diffs.size(); ++i)
    {
        if (diffs[i] - diffs[i - 1] <= tol)
        {
            return true;
        }
    }
    return false;
}

inline bool moduli_tie(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max(a, b);
}

///
/// Moduli of the first and last distributional coefficients c^(0) of a
/// spline, obtained by following the derivative recursion along the two
/// boundary entries only.
///
inline std::pair<double, double> spline_endpoint_moduli(const SplineSignal& s)
{
    const int m = s.order;
    const std::size_t n = s.coefficients.size();
    const auto& t = s.knots;
    double first = std::abs(s.coefficients.front());
    double last = std::abs(s.coefficients.back());
    for (int k = 1; k < m; ++k)
    {
        const auto mk = static_cast<double>(m - k);
        first *= mk / (t[static_cast<std::size_t>(m - k)] - t[0]);
        last *= mk / (t[n + static_cast<std::size_t>(m) - 1] -
                      t[n + static_cast<std::size_t>(k) - 1]);
    }
    return {first, last};
}

} // namespace detail

///
/// Check structural invariants (throws InvalidSignal) and report violations
/// of the uniqueness hypotheses: colliding knot differences and equal
/// endpoint coefficient moduli.
///
inline ValidationReport validate(const SpikeSignal& signal)
{
    if (signal.knots.empty())
    {
        throw Error(ErrorKind::InvalidSignal, "signal has no knots");
    }
    if (signal.knots.size() != signal.coefficients.size())
    {
        throw Error(ErrorKind::InvalidSignal,
                    "knot count " + std::to_string(signal.knots.size()) +
                        " differs from coefficient count " +
                        std::to_string(signal.coefficients.size()));
    }
    detail::check_knots(signal.knots);
    detail::check_finite(signal.coefficients);
    for (std::size_t i = 0; i < signal.coefficients.size(); ++i)
    {
        if (signal.coefficients[i] == Complex(0.0, 0.0))
        {
            throw Error(ErrorKind::InvalidSignal,
                        "coefficient " + std::to_string(i) + " is zero");
        }
    }

    ValidationReport report;
    if (detail::has_difference_collision(signal.knots))
    {
        report.difference_collision = true;
        report.warnings.emplace_back("knot differences collide");
    }
    if (signal.knots.size() >= 2 &&
        detail::moduli_tie(std::abs(signal.coefficients.front()),
                           std::abs(signal.coefficients.back())))
    {
        report.endpoint_modulus_tie = true;
        report.warnings.emplace_back(
            "first and last coefficients have equal modulus");
    }
    return report;
}

inline ValidationReport validate(const SplineSignal& signal)
{
    if (signal.order < 1)
    {
        throw Error(ErrorKind::InvalidSignal, "spline order must be >= 1");
    }
    if (signal.coefficients.empty())
    {
        throw Error(ErrorKind::InvalidSignal, "spline has no coefficients");
    }
    if (signal.knots.size() !=
        signal.coefficients.size() + static_cast<std::size_t>(signal.order))
    {
        throw Error(ErrorKind::InvalidSignal,
                    "knot count " + std::to_string(signal.knots.size()) +
                        " differs from coefficient count + order " +
                        std::to_string(signal.coefficients.size() +
                                       static_cast<std::size_t>(signal.order)));
    }
    detail::check_knots(signal.knots);
    detail::check_finite(signal.coefficients);

    ValidationReport report;
    if (detail::has_difference_collision(signal.knots))
    {
        report.difference_collision = true;
        report.warnings.emplace_back("knot differences collide");
    }
    const auto [first, last] = detail::spline_endpoint_moduli(signal);
    if (detail::moduli_tie(first, last))
    {
        report.endpoint_modulus_tie = true;
        report.warnings.emplace_back(
            "first and last distributional coefficients have equal modulus");
    }
    return report;
}

inline ValidationReport validate(const Signal& signal)
{
    return std::visit([](const auto& s) { return validate(s); }, signal);
}

} // namespace sparse_phase

#endif /* SPARSE_PHASE_MODEL_HPP */
