#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <sparse_phase/error.hpp>
#include <sparse_phase/model.hpp>

#include "test_helpers.hpp"

using namespace sparse_phase;

using test_support::kind_of;

TEST(Error, MessageCarriesKindAndStage)
{
    const Error e(ErrorKind::RootCountMismatch, "found 3");
    EXPECT_EQ(e.kind(), ErrorKind::RootCountMismatch);
    EXPECT_EQ(std::string(e.what()), "RootCountMismatch: found 3");
    EXPECT_TRUE(e.stage().empty());

    const Error staged = e.with_stage("apm");
    EXPECT_EQ(staged.stage(), "apm");
    EXPECT_EQ(staged.kind(), ErrorKind::RootCountMismatch);
    EXPECT_EQ(staged.detail(), "found 3");
    EXPECT_EQ(std::string(staged.what()),
              "stage apm: RootCountMismatch: found 3");
}

TEST(Validate, DistinctDifferencesHaveNoWarnings)
{
    const SpikeSignal s{{0.0, 1.0, 3.0}, {1.0, Complex(0.0, 1.0), 2.0}};
    const auto report = validate(s);
    EXPECT_TRUE(report.clean());
    EXPECT_TRUE(report.warnings.empty());
}

TEST(Validate, ArithmeticProgressionCollides)
{
    const SpikeSignal s{{0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}};
    const auto report = validate(s);
    EXPECT_TRUE(report.difference_collision);
    EXPECT_TRUE(report.endpoint_modulus_tie);
    EXPECT_FALSE(report.clean());
}

TEST(Validate, LengthMismatchIsInvalid)
{
    const SpikeSignal s{{0.0, 0.5}, {1.0}};
    EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::InvalidSignal);
}

TEST(Validate, StructuralFailures)
{
    EXPECT_EQ(kind_of([] { validate(SpikeSignal{}); }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] { validate(SpikeSignal{{1.0, 1.0}, {1.0, 2.0}}); }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] { validate(SpikeSignal{{0.0, 1.0}, {1.0, 0.0}}); }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] {
                  validate(SpikeSignal{{0.0, NAN}, {1.0, 2.0}});
              }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] { validate(SplineSignal{0, {0.0, 1.0}, {1.0}}); }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] { validate(SplineSignal{2, {0.0, 1.0}, {1.0}}); }),
              ErrorKind::InvalidSignal);
    EXPECT_EQ(kind_of([] { validate(SplineSignal{1, {0.0}, {}}); }),
              ErrorKind::InvalidSignal);
}

TEST(Validate, SplineEndpointTieUsesDistributionalCoefficients)
{
    // Hat function on (0, 1, 3): c^(1) = (1, -1/2), c^(0) = (1, -3/2, 1/2).
    const SplineSignal hat{2, {0.0, 1.0, 3.0}, {1.0}};
    EXPECT_FALSE(validate(hat).endpoint_modulus_tie);
    // Symmetric hat: c^(0) = (1, -2, 1).
    const SplineSignal sym{2, {0.0, 1.0, 2.0}, {1.0}};
    EXPECT_TRUE(validate(sym).endpoint_modulus_tie);
}

TEST(Validate, IsSideEffectFreeAndIdempotent)
{
    std::mt19937 rng(7);
    for (int i = 0; i < 20; ++i)
    {
        const auto s = test_support::random_spikes(rng, 5);
        const auto copy = s;
        const auto r1 = validate(s);
        const auto r2 = validate(s);
        EXPECT_EQ(s, copy);
        EXPECT_EQ(r1.warnings, r2.warnings);
    }
}

TEST(SymmetricExponentialSum, RejectsBadFrequencies)
{
    EXPECT_EQ(kind_of([] {
                  (void)SymmetricExponentialSum(1.0, {{0.0, Complex(1.0, 0.0)}});
              }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] {
                  (void)SymmetricExponentialSum(1.0, {{2.0, 1.0}, {1.0, 1.0}});
              }),
              ErrorKind::InvalidArgument);
    EXPECT_EQ(kind_of([] { (void)SymmetricExponentialSum(NAN, {}); }),
              ErrorKind::InvalidArgument);
}

TEST(SymmetricExponentialSum, EvaluatesCosine)
{
    const SymmetricExponentialSum p(3.0, {{1.0, Complex(1.0, 0.0)}});
    EXPECT_EQ(p.full_term_count(), 3U);
    EXPECT_NEAR(p(0.0), 5.0, 1e-15);
    EXPECT_NEAR(p(std::numbers::pi), 1.0, 1e-15);
}

TEST(SymmetricExponentialSum, IsRealEverywhere)
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> omega(-50.0, 50.0);
    const auto taus = test_support::random_taus(rng, 8);
    std::vector<ExponentialTerm> terms;
    for (double t : taus)
    {
        terms.push_back({t, test_support::random_coefficient(rng)});
    }
    const SymmetricExponentialSum p(2.5, terms);
    for (int i = 0; i < 1000; ++i)
    {
        const double w = omega(rng);
        const Complex full = p.evaluate_full(w);
        EXPECT_LE(std::abs(full.imag()), 1e-12 * std::max(1.0, std::abs(full)));
        EXPECT_NEAR(full.real(), p(w), 1e-12 * std::max(1.0, std::abs(full)));
    }
}

TEST(IntensitySamples, FrequencyGrid)
{
    IntensitySamples s{0.25, {1.0, 2.0, 3.0}, SampleKind::Magnitude};
    EXPECT_EQ(s.frequency(2), 0.5);
    EXPECT_NO_THROW(validate(s));
    s.values[1] = -1.0;
    EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::InvalidArgument);
    s.values[1] = 1.0;
    s.step = 0.0;
    EXPECT_EQ(kind_of([&] { validate(s); }), ErrorKind::InvalidArgument);
}

TEST(RecoveryConfig, Validation)
{
    RecoveryConfig c;
    EXPECT_NO_THROW(validate(c));
    c.upper_bound = 1;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
    c.upper_bound = 4;
    c.eps2 = 0.0;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
    c.eps2 = 1e-7;
    c.order = -1;
    EXPECT_EQ(kind_of([&] { validate(c); }), ErrorKind::InvalidArgument);
}

TEST(RecoveryReport, SignalFollowsOrder)
{
    RecoveryReport r;
    r.knots = {0.0, 1.0};
    r.c0 = {1.0, -1.0};
    EXPECT_TRUE(std::holds_alternative<SpikeSignal>(r.signal()));
    r.order = 1;
    r.knots = {0.0, 2.0};
    r.c0 = {3.0, -3.0};
    r.cm = {3.0};
    const auto s = std::get<SplineSignal>(r.signal());
    EXPECT_EQ(s.coefficients, std::vector<Complex>{3.0});
}
