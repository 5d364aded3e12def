#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <illuminati/hard_concrete.hpp>
#include <illuminati/random.hpp>

using namespace illuminati;

namespace {

/// The gate formula written out directly, without shared helpers.
double reference_gate(double m, double beta, double low, double high, double u)
{
    const double s = 1.0 / (1.0 + std::exp(-(std::log(u) - std::log(1.0 - u) + m) / beta));
    return std::min(1.0, std::max(0.0, s * (high - low) + low));
}

} // namespace

TEST(HardConcrete, SymmetricPoint)
{
    const auto g = sample_hard_concrete(0.0, HardConcreteConfig{}, 0.5);
    EXPECT_NEAR(g.gate, 0.5, 1e-15);
    EXPECT_GT(g.d_gate_d_logit, 0.0);
}

TEST(HardConcrete, SaturatesAtOne)
{
    const auto g = sample_hard_concrete(50.0, HardConcreteConfig{}, 0.5);
    EXPECT_EQ(g.gate, 1.0);
    EXPECT_EQ(g.d_gate_d_logit, 0.0);
}

TEST(HardConcrete, ClampsToZeroForSmallNoise)
{
    const double expected = reference_gate(0.0, 0.5, -0.1, 1.1, 0.01);
    EXPECT_EQ(expected, 0.0);
    const auto g = sample_hard_concrete(0.0, HardConcreteConfig{}, 0.01);
    EXPECT_EQ(g.gate, 0.0);
    EXPECT_EQ(g.d_gate_d_logit, 0.0);
}

TEST(HardConcrete, RejectsNoiseOutsideOpenInterval)
{
    for (double u : {0.0, 1.0, -0.2, 1.5, std::nan("")}) {
        try {
            sample_hard_concrete(0.0, HardConcreteConfig{}, u);
            FAIL() << u;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::domain_error);
        }
    }
}

TEST(HardConcrete, MatchesDirectFormula)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> logit(-6.0, 6.0), beta(0.1, 2.0), noise(1e-6, 1.0 - 1e-6);
    for (int t = 0; t < 1000; ++t) {
        HardConcreteConfig cfg;
        cfg.beta = beta(rng);
        const double m = logit(rng), u = noise(rng);
        EXPECT_NEAR(sample_hard_concrete(m, cfg, u).gate, reference_gate(m, cfg.beta, -0.1, 1.1, u), 1e-12);
    }
}

TEST(HardConcrete, SlopeMatchesFiniteDifference)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> logit(-2.0, 2.0), noise(0.05, 0.95);
    HardConcreteConfig cfg;
    for (int t = 0; t < 200; ++t) {
        const double m = logit(rng), u = noise(rng);
        const auto g = sample_hard_concrete(m, cfg, u);
        if (g.gate <= 1e-3 || g.gate >= 1.0 - 1e-3) continue;
        const double h = 1e-6;
        const double fd = (sample_hard_concrete(m + h, cfg, u).gate - sample_hard_concrete(m - h, cfg, u).gate) / (2 * h);
        EXPECT_NEAR(g.d_gate_d_logit, fd, 1e-6);
    }
}

TEST(HardConcrete, MonotoneInLogit)
{
    HardConcreteConfig cfg;
    double previous = -1.0;
    for (double m = -5.0; m <= 5.0; m += 0.25) {
        const double gate = sample_hard_concrete(m, cfg, 0.3).gate;
        EXPECT_GE(gate, previous);
        previous = gate;
    }
}

TEST(ImportanceFromMask, Examples)
{
    EXPECT_EQ(importance_from_mask(0.0, 0.5), 0.5);
    const double beta = 0.5;
    EXPECT_NEAR(importance_from_mask(beta * std::log(0.9 / 0.1), beta), 0.9, 1e-15);
    EXPECT_LT(importance_from_mask(-0.3, beta), importance_from_mask(0.2, beta));
}

TEST(CounterUniform, OpenIntervalAndDeterministic)
{
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const double u = counter_uniform(42, 3, k);
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_EQ(u, counter_uniform(42, 3, k));
    }
    EXPECT_NE(counter_uniform(1, 0, 0), counter_uniform(2, 0, 0));
    EXPECT_NE(counter_uniform(1, 0, 0), counter_uniform(1, 1, 0));
}
