///
/// \file synthesis.hpp
///
/// Forward model: Fourier transforms and intensities of spike trains and
/// splines on an equidistant frequency grid \f$ \omega_k = hk \f$,
/// \f$ k = 0, 1, \ldots \f$.
///
#ifndef SPARSE_PHASE_SYNTHESIS_HPP
#define SPARSE_PHASE_SYNTHESIS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <variant>
#include <vector>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/splines.hpp>

namespace sparse_phase
{
namespace synthesis
{

/// \f$ \sum_j c_j e^{-i\omega T_j} \f$
inline Complex dirac_transform(const std::vector<double>& knots,
                               const std::vector<Complex>& weights,
                               double omega)
{
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < knots.size(); ++j)
    {
        acc += weights[j] * std::polar(1.0, -omega * knots[j]);
    }
    return acc;
}

/// Knots and Dirac weights of \f$ f^{(m)} \f$; for spikes, the signal itself.
struct DiracForm
{
    std::vector<double> knots;
    std::vector<Complex> weights;
};

inline DiracForm dirac_form(const SpikeSignal& signal)
{
    return {signal.knots, signal.coefficients};
}

inline DiracForm dirac_form(const SplineSignal& signal)
{
    auto ladder = splines::differentiate_ladder(signal.order, signal.knots,
                                                signal.coefficients);
    return {signal.knots, ladder.distributional()};
}

inline DiracForm dirac_form(const Signal& signal)
{
    return std::visit([](const auto& s) { return dirac_form(s); }, signal);
}

inline int order_of(const Signal& signal)
{
    if (const auto* s = std::get_if<SplineSignal>(&signal))
    {
        return s->order;
    }
    return 0;
}

/// \f$ |\hat f(\omega)|^2 \f$ as the squared modulus of a single sum.
inline double spike_intensity_squared(const SpikeSignal& signal, double omega)
{
    return std::norm(
        dirac_transform(signal.knots, signal.coefficients, omega));
}

namespace detail
{

///
/// ### LocalSplineForm
///
/// \f$ \hat f(\omega) = \sum_j c_j \hat B_j(\omega) \f$ evaluated
/// B-spline by B-spline in local coordinates
/// \f$ x_i = T_{j+i} - T_j \f$, \f$ i = 0, \ldots, m \f$, with
/// \f$ w_j = x_m \f$:
///
/// - for \f$ |\omega| w_j > 1 \f$ through the Dirac weights
///   \f$ b_{j,i} \f$ of \f$ (B_j)^{(m)} \f$,
///   \f$ \hat B_j(\omega) = e^{-i\omega T_j}
///   \sum_i b_{j,i} e^{-i\omega x_i} / (i\omega)^m \f$;
/// - otherwise through the divided-difference series
///   \f[
///     \hat B_j(\omega) = e^{-i\omega T_j} \, w_j (m-1)!
///     \sum_{n \ge 0} \frac{(-i\omega)^n}{(n+m)!} h_n(x_0, \ldots, x_m),
///   \f]
///   \f$ h_n \f$ the complete homogeneous symmetric polynomials, which has
///   no cancellation for small \f$ \omega \f$.
///
/// Both equal the global form
/// \f$ \sum_j c^{(0)}_j e^{-i\omega T_j} / (i\omega)^m \f$.
///
class LocalSplineForm
{
public:
    static constexpr std::size_t series_terms = 40;

    explicit LocalSplineForm(const SplineSignal& signal)
        : m_signal(signal)
    {
        const int order = signal.order;
        const auto m = static_cast<std::size_t>(order);
        double fact_m1 = 1.0; // (m - 1)!
        for (int i = 2; i < order; ++i)
        {
            fact_m1 *= i;
        }
        for (std::size_t j = 0; j < signal.coefficients.size(); ++j)
        {
            std::vector<double> x(m + 1);
            for (std::size_t i = 0; i <= m; ++i)
            {
                x[i] = signal.knots[j + i] - signal.knots[j];
            }
            m_width.push_back(x[m]);
            m_dirac.push_back(
                splines::differentiate_ladder(order, x, {Complex(1.0, 0.0)})
                    .distributional());

            // h_n(x_0, ..., x_i) = h_n(x_0, ..., x_{i-1}) + x_i h_{n-1}(x_0, ..., x_i)
            std::vector<double> h(series_terms, 0.0);
            h[0] = 1.0;
            for (std::size_t i = 1; i <= m; ++i)
            {
                for (std::size_t n = 1; n < series_terms; ++n)
                {
                    h[n] += x[i] * h[n - 1];
                }
            }
            double fact = fact_m1 * static_cast<double>(m); // (n + m)! at n = 0
            for (std::size_t n = 0; n < series_terms; ++n)
            {
                if (n > 0)
                {
                    fact *= static_cast<double>(n + m);
                }
                h[n] *= x[m] * fact_m1 / fact;
            }
            m_series.push_back(std::move(h));
        }
    }

    /// \f$ \hat f(\omega) \f$ for \f$ \omega \ne 0 \f$.
    Complex transform(double omega) const
    {
        const auto& t = m_signal.knots;
        const Complex iw_m = std::pow(Complex(0.0, omega), m_signal.order);
        const Complex z(0.0, -omega);
        Complex acc(0.0, 0.0);
        for (std::size_t j = 0; j < m_signal.coefficients.size(); ++j)
        {
            Complex local(0.0, 0.0);
            if (std::abs(omega) * m_width[j] <= 1.0)
            {
                const auto& a = m_series[j];
                for (std::size_t n = a.size(); n-- > 0;)
                {
                    local = local * z + a[n];
                }
            }
            else
            {
                for (std::size_t i = 0; i < m_dirac[j].size(); ++i)
                {
                    local += m_dirac[j][i] *
                             std::polar(1.0, -omega * (t[j + i] - t[j]));
                }
                local /= iw_m;
            }
            acc += m_signal.coefficients[j] * local *
                   std::polar(1.0, -omega * t[j]);
        }
        return acc;
    }

private:
    const SplineSignal& m_signal;
    std::vector<double> m_width;
    std::vector<std::vector<Complex>> m_dirac;
    std::vector<std::vector<double>> m_series;
};

} // namespace detail

/// \f$ \hat f(\omega) \f$ of a spline; the removable singularity at
/// \f$ \omega = 0 \f$ is filled with \f$ \int f \f$.
inline Complex spline_transform(const SplineSignal& signal, double omega)
{
    if (omega == 0.0)
    {
        return splines::spline_integral(signal);
    }
    return detail::LocalSplineForm(signal).transform(omega);
}

///
/// \f$ |\hat f(\omega)|^2 =
/// |\sum_j c_j^{(0)} e^{-i\omega T_j}|^2 / \omega^{2m} \f$, and
/// \f$ |\int f|^2 \f$ at \f$ \omega = 0 \f$. Evaluated through
/// detail::LocalSplineForm.
///
inline double spline_intensity_squared(const SplineSignal& signal,
                                       double omega)
{
    if (omega == 0.0)
    {
        return std::norm(splines::spline_integral(signal));
    }
    return std::norm(detail::LocalSplineForm(signal).transform(omega));
}

inline double intensity_squared(const Signal& signal, double omega)
{
    if (const auto* s = std::get_if<SpikeSignal>(&signal))
    {
        return spike_intensity_squared(*s, omega);
    }
    return spline_intensity_squared(std::get<SplineSignal>(signal), omega);
}

///
/// Magnitudes \f$ |\hat f(hk)| \f$ for \f$ k = 0, \ldots, count - 1 \f$.
/// Each element is computed independently of the others.
///
inline IntensitySamples sample_intensities(const Signal& signal, double step,
                                           std::size_t count)
{
    if (!std::isfinite(step) || !(step > 0.0))
    {
        throw Error(ErrorKind::InvalidArgument, "step must be positive");
    }
    if (count < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "count must be >= 1");
    }
    validate(signal);

    IntensitySamples out;
    out.step = step;
    out.kind = SampleKind::Magnitude;
    out.values.resize(count);

    if (const auto* spikes = std::get_if<SpikeSignal>(&signal))
    {
        for (std::size_t k = 0; k < count; ++k)
        {
            const double omega = step * static_cast<double>(k);
            out.values[k] = std::abs(
                dirac_transform(spikes->knots, spikes->coefficients, omega));
        }
        return out;
    }

    const auto& spline = std::get<SplineSignal>(signal);
    const detail::LocalSplineForm local(spline);
    out.values[0] = std::abs(splines::spline_integral(spline));
    for (std::size_t k = 1; k < count; ++k)
    {
        const double omega = step * static_cast<double>(k);
        out.values[k] = std::abs(local.transform(omega));
    }
    return out;
}

///
/// Squared intensities of the m-th derivative,
/// \f$ (hk)^{2m} |\hat f(hk)|^2 \f$. For `m == 0` this is plain squaring.
///
inline IntensitySamples derivative_weight(const IntensitySamples& samples,
                                          int m)
{
    if (samples.kind != SampleKind::Magnitude)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "derivative weighting expects magnitude samples");
    }
    if (m < 0)
    {
        throw Error(ErrorKind::InvalidArgument, "order must be >= 0");
    }
    validate(samples);
    IntensitySamples out;
    out.step = samples.step;
    out.kind = SampleKind::DerivativeWeighted;
    out.values.resize(samples.values.size());
    for (std::size_t k = 0; k < samples.values.size(); ++k)
    {
        const double omega = samples.frequency(k);
        const double v = samples.values[k];
        out.values[k] = std::pow(omega * omega, m) * v * v;
    }
    return out;
}

///
/// Exact autocorrelation exponential sum of a Dirac train,
/// \f$ \gamma_0 = \sum_j |c_j|^2 \f$ and \f$ \gamma = c_j \overline{c_k} \f$
/// at \f$ \tau = T_j - T_k > 0 \f$. Bitwise-equal differences are merged.
///
inline SymmetricExponentialSum
autocorrelation_sum(const std::vector<double>& knots,
                    const std::vector<Complex>& weights)
{
    double gamma0 = 0.0;
    for (const auto& c : weights)
    {
        gamma0 += std::norm(c);
    }
    std::map<double, Complex> merged;
    for (std::size_t j = 0; j < knots.size(); ++j)
    {
        for (std::size_t k = 0; k < j; ++k)
        {
            merged[knots[j] - knots[k]] += weights[j] * std::conj(weights[k]);
        }
    }
    std::vector<ExponentialTerm> terms;
    terms.reserve(merged.size());
    for (const auto& [tau, gamma] : merged)
    {
        terms.push_back({tau, gamma});
    }
    return SymmetricExponentialSum(gamma0, std::move(terms));
}

/// Sum describing \f$ \omega^{2m} |\hat f(\omega)|^2 \f$ for any model.
inline SymmetricExponentialSum autocorrelation_sum(const Signal& signal)
{
    const auto form = dirac_form(signal);
    return autocorrelation_sum(form.knots, form.weights);
}

} // namespace synthesis
} // namespace sparse_phase

#endif /* SPARSE_PHASE_SYNTHESIS_HPP */
