///
/// \file retrieval.hpp
///
/// Phase retrieval proper: knots and Dirac weights from the exponential sum
/// of the squared intensity, the end-to-end pipeline, and comparison of
/// signals modulo the trivial ambiguities (rotation, shift and conjugate
/// reflection).
///
#ifndef SPARSE_PHASE_RETRIEVAL_HPP
#define SPARSE_PHASE_RETRIEVAL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>
#include <sparse_phase/prony.hpp>
#include <sparse_phase/splines.hpp>
#include <sparse_phase/synthesis.hpp>

namespace sparse_phase
{
namespace retrieval
{

///
/// Knot differences (with their coefficients) that remain to be explained
/// by the knots placed so far.
///
class DistancePool
{
public:
    DistancePool(const SymmetricExponentialSum& sum, double eps)
        : m_entries(sum.terms()), m_eps(eps)
    {
    }

    bool empty() const noexcept
    {
        return m_entries.empty();
    }

    std::size_t size() const noexcept
    {
        return m_entries.size();
    }

    double tolerance() const noexcept
    {
        return m_eps;
    }

    const std::vector<ExponentialTerm>& entries() const noexcept
    {
        return m_entries;
    }

    /// Index of the largest remaining distance.
    std::size_t max_index() const
    {
        return m_entries.size() - 1;
    }

    ///
    /// Entry closest to `tau` within the tolerance, skipping `exclude`.
    ///
    std::optional<std::size_t>
    find(double tau, std::optional<std::size_t> exclude = std::nullopt) const
    {
        std::optional<std::size_t> best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m_entries.size(); ++i)
        {
            if (exclude && *exclude == i)
            {
                continue;
            }
            const double d = std::abs(m_entries[i].tau - tau);
            if (d <= m_eps && d < best_dist)
            {
                best = i;
                best_dist = d;
            }
        }
        return best;
    }

    /// Removes the entry closest to `tau`; PoolInconsistent if none matches.
    void remove(double tau)
    {
        const auto i = find(tau);
        if (!i)
        {
            throw Error(ErrorKind::PoolInconsistent,
                        "no remaining distance matches " + std::to_string(tau));
        }
        m_entries.erase(m_entries.begin() + static_cast<std::ptrdiff_t>(*i));
    }

private:
    std::vector<ExponentialTerm> m_entries; // ascending in tau
    double m_eps;
};

struct SupportResult
{
    std::vector<double> knots;
    std::vector<Complex> coefficients;
};

namespace detail
{

/// Removes the distances from `knot` to every placed knot; equal distances
/// (a centre knot) share one pool entry.
inline void remove_distances(DistancePool& pool,
                             const std::vector<double>& placed, double knot)
{
    std::vector<double> removed;
    for (double t : placed)
    {
        const double d = std::abs(knot - t);
        const bool duplicate =
            std::any_of(removed.begin(), removed.end(), [&](double r) {
                return std::abs(r - d) <= pool.tolerance();
            });
        if (!duplicate)
        {
            pool.remove(d);
            removed.push_back(d);
        }
    }
}

inline SupportResult sorted(std::vector<double> knots,
                            std::vector<Complex> coefficients)
{
    std::vector<std::size_t> order(knots.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return knots[a] < knots[b];
    });
    SupportResult out;
    for (auto i : order)
    {
        out.knots.push_back(knots[i]);
        out.coefficients.push_back(coefficients[i]);
    }
    return out;
}

} // namespace detail

///
/// ### recover_support
///
/// Knots \f$ 0 = T_1 < \cdots < T_K \f$ and weights \f$ c_j \f$ whose
/// autocorrelation reproduces `sum`, i.e. \f$ \gamma_0 = \sum_j |c_j|^2 \f$
/// and \f$ \gamma = c_j \overline{c_k} \f$ at \f$ \tau = T_j - T_k \f$.
///
/// The outer knots come from the two largest distances; the remaining ones
/// are placed greedily from the largest remaining distance \f$ \tau_{k^*} \f$
/// and its complement \f$ \tau_{\ell^*} \approx T_K - \tau_{k^*} \f$,
/// deciding between the knots \f$ \tau_{k^*} \f$ and
/// \f$ T_K - \tau_{k^*} \f$ by the consistency of the coefficients. The
/// result has \f$ c_1 \f$ real and non-negative.
///
/// K = 1 gives one knot with \f$ c_1 = \sqrt{\gamma_0} \f$; K = 2 solves
/// the quadratic for \f$ |c_1|^2, |c_2|^2 \f$ with \f$ |c_1| \le |c_2| \f$.
///
/// \param tie_margin  relative margin below which the two placement
///                    hypotheses count as a tie (AmbiguousCase).
///
inline SupportResult recover_support(const SymmetricExponentialSum& sum,
                                     double eps, double tie_margin = 1e-6)
{
    if (!(eps > 0.0) || !(tie_margin > 0.0))
    {
        throw Error(ErrorKind::InvalidArgument,
                    "eps and tie margin must be positive");
    }
    const std::size_t k_total = prony::infer_support_size(
        sum.positive_term_count());
    const auto& terms = sum.terms();

    if (k_total == 1)
    {
        if (!(sum.gamma0() > 0.0))
        {
            throw Error(ErrorKind::DegenerateInput,
                        "gamma0 must be positive");
        }
        return {{0.0}, {Complex(std::sqrt(sum.gamma0()), 0.0)}};
    }
    if (k_total == 2)
    {
        // x^2 - gamma0 x + |gamma1|^2 = 0 with x = |c1|^2 the smaller root
        const double g0 = sum.gamma0();
        const double p = std::norm(terms[0].gamma);
        const double disc = std::max(g0 * g0 - 4.0 * p, 0.0);
        const double big = 0.5 * (g0 + std::sqrt(disc));
        if (!(big > 0.0))
        {
            throw Error(ErrorKind::DegenerateInput,
                        "gamma0 must be positive");
        }
        const double small = p / big;
        const double c1 = std::sqrt(small);
        if (!(c1 > 0.0))
        {
            throw Error(ErrorKind::DegenerateInput,
                        "vanishing coefficient for K = 2");
        }
        return {{0.0, terms[0].tau},
                {Complex(c1, 0.0), terms[0].gamma / c1}};
    }

    DistancePool pool(sum, eps);
    const auto t_max = terms.back();
    const auto t_sec = terms[terms.size() - 2];
    const double span = t_max.tau;

    const std::size_t i_max = pool.max_index();
    const auto i_gap = pool.find(t_max.tau - t_sec.tau);
    if (!i_gap || *i_gap == i_max || *i_gap == i_max - 1)
    {
        throw Error(ErrorKind::UnmatchedDistance,
                    "no distance matches tau_max - tau_second");
    }
    const Complex g_gap = pool.entries()[*i_gap].gamma;
    const double c1 =
        std::sqrt(std::abs(t_max.gamma * std::conj(t_sec.gamma) / g_gap));
    if (!(c1 > 0.0) || !std::isfinite(c1))
    {
        throw Error(ErrorKind::DegenerateInput,
                    "first coefficient vanishes or is not finite");
    }
    const Complex c_last = t_max.gamma / c1;

    std::vector<double> knots{0.0, span, t_sec.tau};
    std::vector<Complex> coeffs{Complex(c1, 0.0), c_last, t_sec.gamma / c1};
    pool.remove(span);
    pool.remove(t_sec.tau);
    pool.remove(t_max.tau - t_sec.tau);

    while (!pool.empty())
    {
        if (knots.size() >= k_total)
        {
            throw Error(ErrorKind::PoolInconsistent,
                        std::to_string(pool.size()) +
                            " distances left after placing all knots");
        }
        const std::size_t k = pool.max_index();
        const auto tk = pool.entries()[k];
        auto l = pool.find(span - tk.tau, k);
        if (!l && std::abs(2.0 * tk.tau - span) <= eps)
        {
            l = k;
        }
        if (!l)
        {
            throw Error(ErrorKind::UnmatchedDistance,
                        "no complement for distance " +
                            std::to_string(tk.tau));
        }
        const auto tl = pool.entries()[*l];

        double knot;
        Complex coeff;
        if (std::abs(tk.tau - tl.tau) <= eps)
        {
            knot = 0.5 * span;
            coeff = tk.gamma / c1;
        }
        else
        {
            const Complex d_r = tk.gamma / c1;
            const Complex d_l = tl.gamma / c1;
            const double res_r = std::abs(c_last * std::conj(d_r) - tl.gamma);
            const double res_l = std::abs(c_last * std::conj(d_l) - tk.gamma);
            if (std::abs(res_r - res_l) <=
                tie_margin * (std::abs(tk.gamma) + std::abs(tl.gamma)))
            {
                throw Error(ErrorKind::AmbiguousCase,
                            "placement of distance " +
                                std::to_string(tk.tau) +
                                " is undecidable; first and last "
                                "coefficients have equal modulus");
            }
            if (res_r < res_l)
            {
                knot = 0.5 * (tk.tau + span - tl.tau);
                coeff = d_r;
            }
            else
            {
                knot = 0.5 * (tl.tau + span - tk.tau);
                coeff = d_l;
            }
        }
        detail::remove_distances(pool, knots, knot);
        knots.push_back(knot);
        coeffs.push_back(coeff);
    }
    if (knots.size() != k_total)
    {
        throw Error(ErrorKind::PoolInconsistent,
                    "placed " + std::to_string(knots.size()) + " of " +
                        std::to_string(k_total) + " knots");
    }
    return detail::sorted(std::move(knots), std::move(coeffs));
}

namespace detail
{

/// Drops the weakest terms down to the largest triangular count.
inline SymmetricExponentialSum trim_to_triangular(
    const SymmetricExponentialSum& sum)
{
    std::size_t k = 1;
    while ((k + 1) * k / 2 <= sum.positive_term_count())
    {
        ++k;
    }
    const std::size_t keep = k * (k - 1) / 2;
    auto terms = sum.terms();
    std::stable_sort(terms.begin(), terms.end(),
                     [](const ExponentialTerm& a, const ExponentialTerm& b) {
                         return std::abs(a.gamma) > std::abs(b.gamma);
                     });
    terms.resize(keep);
    std::sort(terms.begin(), terms.end(),
              [](const ExponentialTerm& a, const ExponentialTerm& b) {
                  return a.tau < b.tau;
              });
    return SymmetricExponentialSum(sum.gamma0(), std::move(terms));
}

template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f())
{
    try
    {
        return f();
    }
    catch (const Error& e)
    {
        if (!e.stage().empty())
        {
            throw;
        }
        throw e.with_stage(stage);
    }
}

} // namespace detail

/// Degree bound handed to the APM for at most `knots` knots.
inline int apm_bound(int knots)
{
    return knots * (knots - 1) + 1;
}

///
/// ### recover_signal
///
/// Spike train (order 0) or spline from equidistant magnitudes
/// \f$ |\hat f(hk)| \f$, \f$ k = 0, \ldots, 2\breve M \f$:
///
/// 1. weight the squared magnitudes by \f$ (hk)^{2m} \f$,
/// 2. recover the exponential sum by the APM with degree bound
///    \f$ L(L-1) + 1 \f$, L the knot bound of `config`,
/// 3. infer the knot count from the number of frequencies,
/// 4. place knots and Dirac weights (recover_support),
/// 5. for splines, lift the Dirac weights to order-m coefficients.
///
/// Errors carry the stage (`input`, `weight`, `apm`, `support-size`,
/// `support`, `lift`) in which they occurred.
///
/// \pre \f$ L(L-1) < \breve M \f$.
///
inline RecoveryReport recover_signal(const IntensitySamples& samples,
                                     const RecoveryConfig& config)
{
    detail::staged("input", [&] {
        validate(config);
        validate(samples);
        if (samples.kind != SampleKind::Magnitude)
        {
            throw Error(ErrorKind::InvalidArgument,
                        "recovery expects magnitude samples");
        }
        const auto half = (samples.size() == 0 ? 0 : samples.size() - 1) / 2;
        const auto bound = static_cast<std::size_t>(config.upper_bound);
        if (!(bound * (bound - 1) < half))
        {
            throw Error(ErrorKind::InvalidArgument,
                        "L(L-1) < (count-1)/2 violated: L = " +
                            std::to_string(bound) + ", count = " +
                            std::to_string(samples.size()));
        }
    });

    const auto p = detail::staged("weight", [&] {
        return synthesis::derivative_weight(samples, config.order);
    });

    const prony::ApmConfig apm_config{apm_bound(config.upper_bound),
                                      config.eps1, config.eps2, config.eps3};
    auto sum = detail::staged(
        "apm", [&] { return prony::approximate_prony(p, apm_config); });

    RecoveryReport report;
    report.order = config.order;
    report.residuals.apm = prony::relative_residual(sum, p);
    report.residuals.gamma0 = sum.gamma0();

    const std::size_t k_total = detail::staged("support-size", [&] {
        try
        {
            return prony::infer_support_size(sum.positive_term_count());
        }
        catch (const Error& e)
        {
            if (e.kind() != ErrorKind::NotTriangular)
            {
                throw;
            }
            const auto before = sum.positive_term_count();
            sum = detail::trim_to_triangular(sum);
            report.warnings.push_back(
                "non-triangular frequency count " + std::to_string(before) +
                "; kept the " + std::to_string(sum.positive_term_count()) +
                " strongest terms");
            return prony::infer_support_size(sum.positive_term_count());
        }
    });
    if (k_total > static_cast<std::size_t>(config.upper_bound))
    {
        report.warnings.push_back("recovered " + std::to_string(k_total) +
                                  " knots, more than the bound " +
                                  std::to_string(config.upper_bound));
    }
    report.positive_terms = sum.positive_term_count();

    auto support = detail::staged("support", [&] {
        return recover_support(sum, config.eps, config.tie_margin);
    });
    report.knots = support.knots;
    report.c0 = support.coefficients;

    double energy = 0.0;
    for (const auto& c : report.c0)
    {
        energy += std::norm(c);
    }
    report.residuals.gamma0_gap = std::abs(sum.gamma0() - energy);

    if (config.order > 0)
    {
        const auto lifted = detail::staged("lift", [&] {
            if (report.knots.size() <= static_cast<std::size_t>(config.order))
            {
                throw Error(ErrorKind::InconsistentSystem,
                            "fewer knots than order + 1");
            }
            return splines::lift_coefficients(config.order, report.knots,
                                              report.c0,
                                              config.lifting_tolerance);
        });
        report.cm = lifted.coefficients;
        report.residuals.lifting = lifted.relative_residual;
    }

    // Weighted intensities of the recovered model against the input.
    double num = 0.0;
    double den = 0.0;
    const auto auto_sum =
        synthesis::autocorrelation_sum(report.knots, report.c0);
    for (std::size_t k = 0; k < p.size(); ++k)
    {
        num = std::max(num, std::abs(auto_sum(p.frequency(k)) - p.values[k]));
        den = std::max(den, std::abs(p.values[k]));
    }
    report.residuals.intensity = den > 0.0 ? num / den : num;
    return report;
}

namespace detail
{

inline Complex unit_phase_conj(const Complex& c)
{
    const double r = std::abs(c);
    return r > 0.0 ? std::conj(c) / r : Complex(1.0, 0.0);
}

template <typename S>
void shift_to_zero(S& s)
{
    const double t0 = s.knots.front();
    if (t0 != 0.0)
    {
        for (auto& t : s.knots)
        {
            t -= t0;
        }
        s.knots.front() = 0.0;
    }
}

template <typename S>
void rotate_first_real(S& s)
{
    const Complex first = s.coefficients.front();
    if (first.imag() == 0.0 && first.real() >= 0.0)
    {
        return;
    }
    const Complex rot = unit_phase_conj(first);
    for (auto& c : s.coefficients)
    {
        c *= rot;
    }
    s.coefficients.front() = Complex(std::abs(first), 0.0);
}

} // namespace detail

/// \f$ \overline{f(-t)} \f$: knots negated and reversed, coefficients
/// reversed and conjugated.
template <typename S>
S reflect(const S& s)
{
    S out = s;
    out.knots.assign(s.knots.rbegin(), s.knots.rend());
    for (auto& t : out.knots)
    {
        t = -t;
    }
    out.coefficients.assign(s.coefficients.rbegin(), s.coefficients.rend());
    for (auto& c : out.coefficients)
    {
        c = std::conj(c);
    }
    return out;
}

/// \f$ e^{i\alpha} f(t - t_0) \f$.
template <typename S>
S rotate_shift(const S& s, double alpha, double t0)
{
    S out = s;
    for (auto& t : out.knots)
    {
        t += t0;
    }
    const Complex rot = std::polar(1.0, alpha);
    for (auto& c : out.coefficients)
    {
        c *= rot;
    }
    return out;
}

///
/// Representative of the trivial-ambiguity class: first knot at zero,
/// \f$ |c^{(0)}_{first}| \le |c^{(0)}_{last}| \f$ (reflecting otherwise),
/// first coefficient real and non-negative.
///
inline SpikeSignal canonicalize(const SpikeSignal& signal)
{
    SpikeSignal out = signal;
    if (std::abs(out.coefficients.front()) > std::abs(out.coefficients.back()))
    {
        out = reflect(out);
    }
    detail::shift_to_zero(out);
    detail::rotate_first_real(out);
    return out;
}

inline SplineSignal canonicalize(const SplineSignal& signal)
{
    SplineSignal out = signal;
    const auto [first, last] = sparse_phase::detail::spline_endpoint_moduli(out);
    if (first > last)
    {
        out = reflect(out);
    }
    detail::shift_to_zero(out);
    detail::rotate_first_real(out);
    return out;
}

inline Signal canonicalize(const Signal& signal)
{
    return std::visit([](const auto& s) -> Signal { return canonicalize(s); },
                      signal);
}

struct Equivalence
{
    bool equivalent = false;
    double knot_deviation = std::numeric_limits<double>::infinity();
    double coefficient_deviation = std::numeric_limits<double>::infinity();
};

namespace detail
{

template <typename S>
Equivalence compare_canonical(const S& a, const S& b, double tol)
{
    Equivalence out;
    if (a.knots.size() != b.knots.size() ||
        a.coefficients.size() != b.coefficients.size())
    {
        return out;
    }
    out.knot_deviation = 0.0;
    for (std::size_t i = 0; i < a.knots.size(); ++i)
    {
        out.knot_deviation =
            std::max(out.knot_deviation, std::abs(a.knots[i] - b.knots[i]));
    }
    out.coefficient_deviation = 0.0;
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
    {
        out.coefficient_deviation =
            std::max(out.coefficient_deviation,
                     std::abs(a.coefficients[i] - b.coefficients[i]));
    }
    out.equivalent =
        out.knot_deviation <= tol && out.coefficient_deviation <= tol;
    return out;
}

template <typename S>
Equivalence equivalent_impl(const S& a, const S& b, double tol)
{
    const S ca = canonicalize(a);
    auto best = compare_canonical(ca, canonicalize(b), tol);
    // With nearly equal endpoint moduli the reflection choice may differ
    // between a and b; also try b's other orientation.
    S rb = reflect(b);
    detail::shift_to_zero(rb);
    detail::rotate_first_real(rb);
    const auto alt = compare_canonical(ca, rb, tol);
    const auto score = [](const Equivalence& e) {
        return std::max(e.knot_deviation, e.coefficient_deviation);
    };
    if ((alt.equivalent && !best.equivalent) ||
        (alt.equivalent == best.equivalent && score(alt) < score(best)))
    {
        best = alt;
    }
    return best;
}

} // namespace detail

///
/// Whether `a` and `b` agree up to rotation, shift and conjugate reflection,
/// with the maximal knot and coefficient deviations of the canonical forms.
/// Scaling is not a trivial ambiguity.
///
inline Equivalence equivalent_mod_trivial(const SpikeSignal& a,
                                          const SpikeSignal& b, double tol)
{
    return detail::equivalent_impl(a, b, tol);
}

inline Equivalence equivalent_mod_trivial(const SplineSignal& a,
                                          const SplineSignal& b, double tol)
{
    if (a.order != b.order)
    {
        return {};
    }
    return detail::equivalent_impl(a, b, tol);
}

/// Signals of different model type or order are never equivalent.
inline Equivalence equivalent_mod_trivial(const Signal& a, const Signal& b,
                                          double tol)
{
    if (a.index() != b.index())
    {
        return {};
    }
    if (const auto* sa = std::get_if<SpikeSignal>(&a))
    {
        return equivalent_mod_trivial(*sa, std::get<SpikeSignal>(b), tol);
    }
    return equivalent_mod_trivial(std::get<SplineSignal>(a),
                                  std::get<SplineSignal>(b), tol);
}

} // namespace retrieval
} // namespace sparse_phase

#endif /* SPARSE_PHASE_RETRIEVAL_HPP */
