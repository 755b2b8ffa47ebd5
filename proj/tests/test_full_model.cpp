#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "squeezelim/full_model.hpp"
#include "squeezelim/single_mode.hpp"

using namespace squeezelim;
using full::Port;
using full::Quadrature;

namespace
{

FullModelParams lossless(double r_c, double gain = 1.0)
{
    FullModelParams fp;
    fp.r_c = r_c;
    fp.gain = gain;
    fp.tau = 1e-8;
    return fp;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

struct RandomDraw
{
    FullModelParams fp;
    double beta = 1.0;
};

RandomDraw random_draw(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RandomDraw d;
    auto& fp = d.fp;
    fp.r_c = std::sqrt(1.0 - (1e-3 + 0.3 * u(rng)));
    fp.r_b = u(rng) < 0.5 ? 1.0 : std::sqrt(1.0 - 0.05 * u(rng));
    fp.r_int = std::sqrt(0.1 * u(rng));
    fp.r_i = std::sqrt(0.3 * u(rng));
    fp.r_d = std::sqrt(0.5 * u(rng));
    fp.tau = 1e-6 * (0.1 + u(rng));
    fp.zeta = u(rng) < 0.3 ? 1.0 : 1.0 + 20.0 * u(rng);
    // stay below threshold in both quadratures
    const double g_th = full::threshold_gain(fp);
    const double frac = -0.98 + 1.96 * u(rng);
    fp.gain = std::pow(g_th, frac);
    d.beta = 1.0 + 100.0 * u(rng);
    return d;
}

}  // namespace

TEST(IoCoefficients, PassiveResonantBuildup)
{
    const double r_c = std::sqrt(0.99);
    const auto pc = full::io_coefficients(lossless(r_c), 0.0);
    const auto s = pc.at(Quadrature::phase, Port::signal);
    EXPECT_NEAR(s.real(), std::sqrt(0.01) / (1.0 - r_c), 1e-9);
    EXPECT_NEAR(s.imag(), 0.0, 1e-12);
    EXPECT_EQ(pc.at(Quadrature::amplitude, Port::signal), full::complex{});
}

TEST(IoCoefficients, LosslessCavityReflectsEverything)
{
    const auto fp = lossless(std::sqrt(0.97));
    for (double w : {0.0, 1e5, 3.3e6, 7.7e7}) {
        const auto pc = full::io_coefficients(fp, w);
        EXPECT_NEAR(std::norm(pc.at(Quadrature::phase, Port::vacuum)), 1.0, 1e-12);
        EXPECT_NEAR(std::norm(pc.at(Quadrature::amplitude, Port::vacuum)), 1.0, 1e-12);
    }
}

TEST(IoCoefficients, MatchSingleModeAtSmallGain)
{
    CavityParams p;
    p.t_c = 0.01;
    p.tau = 1e-8;
    const SqueezeSettings s{0.005, 1.0, 1.0};
    const auto fp = map_single_mode_to_full(p, s);
    const auto pc = full::io_coefficients(fp, 0.0);

    const double d = single_mode::denominator(p, s.q, 0.0);
    const double m = single_mode::reflection_numerator(p, s.q, 0.0);
    EXPECT_LT(rel(std::norm(pc.at(Quadrature::phase, Port::signal)), 4.0 * p.t_c / d), 0.01);
    EXPECT_LT(rel(std::norm(pc.at(Quadrature::phase, Port::vacuum)), m / d), 0.01);
}

TEST(IoCoefficients, ThresholdIsRejected)
{
    auto fp = lossless(std::sqrt(0.99));
    fp.gain = full::threshold_gain(fp);
    EXPECT_THROW(full::io_coefficients(fp, 0.0), ThresholdError);
    fp.gain = 1.0 / full::threshold_gain(fp);
    EXPECT_THROW(full::io_coefficients(fp, 0.0), ThresholdError);
    EXPECT_THROW(full::noise_psd_closed(fp, 1.0, 0.0), ThresholdError);
    EXPECT_THROW(full::transfer_sq_closed(fp, 0.0), ThresholdError);
}

TEST(NoisePsd, VacuumThroughput)
{
    const auto fp = lossless(std::sqrt(0.99));
    for (double w : {0.0, 1e6, 5e7}) {
        EXPECT_NEAR(full::noise_psd_closed(fp, 1.0, w), 1.0, 1e-12);
        EXPECT_NEAR(full::noise_psd_sum(fp, 1.0, w), 1.0, 1e-12);
    }
}

TEST(NoisePsd, ReflectedSqueezing)
{
    const auto fp = lossless(std::sqrt(0.99));
    EXPECT_NEAR(full::noise_psd_closed(fp, 10.0, 0.0), 0.1, 1e-12);
    EXPECT_NEAR(full::noise_psd_sum(fp, 10.0, 0.0), 0.1, 1e-12);
    EXPECT_NEAR(full::noise_psd_sum(fp, 10.0, 0.0, Quadrature::amplitude), 10.0, 1e-10);
}

TEST(NoisePsd, ClosedFormEqualsCoefficientSumExample)
{
    CavityParams p;
    p.t_c = 0.01;
    p.eps_int = 0.001;
    p.eps_read = 0.05;
    const auto fp = map_single_mode_to_full(p, SqueezeSettings{0.005, 1.0, 1.0});
    EXPECT_LT(rel(full::noise_psd_closed(fp, 1.0, 0.0), full::noise_psd_sum(fp, 1.0, 0.0)), 1e-10);
}

TEST(NoisePsd, FlippedS2SignBreaksPassivity)
{
    // With -(...)(R_b - G^4 R_c) in S2 a passive lossless cavity
    // gives 1 - 2 R_c instead of vacuum, so the closed form uses +G^4 R_c.
    const double R_c = 0.99;
    const double s2_flipped = 1.0 + R_c - (1.0 - R_c);
    const double flipped = 1.0 - s2_flipped / ((1.0 - std::sqrt(R_c)) * (1.0 - std::sqrt(R_c)));
    EXPECT_GT(std::abs(flipped - 1.0), 1.0);
    EXPECT_NEAR(full::noise_psd_closed(lossless(std::sqrt(R_c)), 1.0, 0.0), 1.0, 1e-12);
}

TEST(NoisePsdProperty, ClosedFormEqualsOracle)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const auto d = random_draw(rng);
        const double omega = w(rng) * 3.0 / d.fp.tau;
        const double closed = full::noise_psd_closed(d.fp, d.beta, omega);
        const double oracle = full::noise_psd_sum(d.fp, d.beta, omega);
        ASSERT_LT(rel(closed, oracle), 1e-10) << "draw " << i;
        ASSERT_GT(closed, 0.0);
    }
}

TEST(NoisePsdProperty, PurityPreservedWithoutLoss)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        FullModelParams fp = lossless(std::sqrt(1.0 - (1e-3 + 0.2 * u(rng))));
        fp.gain = std::pow(full::threshold_gain(fp), -0.99 + 1.98 * u(rng));
        fp.zeta = 1.0 + 5.0 * u(rng);
        const double beta = 1.0 + 50.0 * u(rng);
        const double omega = u(rng) * 2.0 / fp.tau;
        const auto v = full::output_variances(fp, beta, omega);
        ASSERT_NEAR(v.amplitude * v.phase, 1.0, 1e-10);
    }
}

TEST(NoisePsdProperty, VacuumInvariantUnderLoss)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        auto d = random_draw(rng);
        d.fp.gain = 1.0;
        d.fp.zeta = 1.0;
        const double omega = 1e5 * i;
        ASSERT_NEAR(full::noise_psd_closed(d.fp, 1.0, omega), 1.0, 1e-12);
        ASSERT_NEAR(full::noise_psd_sum(d.fp, 1.0, omega), 1.0, 1e-12);
    }
}

TEST(NoisePsdProperty, PeriodicAndEven)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto d = random_draw(rng);
        const double omega = 0.37 * (i + 1) / d.fp.tau;
        const double period = std::numbers::pi / d.fp.tau;
        const double s = full::noise_psd_closed(d.fp, d.beta, omega);
        EXPECT_NEAR(full::noise_psd_closed(d.fp, d.beta, omega + period), s, 1e-9 * s);
        EXPECT_EQ(full::noise_psd_closed(d.fp, d.beta, -omega), s);
        const double t = full::transfer_sq_closed(d.fp, omega);
        EXPECT_NEAR(full::transfer_sq_closed(d.fp, omega + period), t, 1e-9 * t);
        EXPECT_EQ(full::transfer_sq_closed(d.fp, -omega), t);
    }
}

TEST(Transfer, ResonantBuildup)
{
    const double T_c = 0.01;
    const auto fp = lossless(std::sqrt(1.0 - T_c));
    const double expected = T_c / std::pow(1.0 - std::sqrt(1.0 - T_c), 2);
    EXPECT_NEAR(full::transfer_sq_closed(fp, 0.0) / expected, 1.0, 1e-10);
    EXPECT_NEAR(full::transfer_sq_closed(fp, 0.0) * T_c / 4.0, 1.0, T_c);
    // equals |signal coefficient|^2
    EXPECT_NEAR(full::transfer_sq_closed(fp, 1234.5),
                std::norm(full::io_coefficients(fp, 1234.5).at(Quadrature::phase, Port::signal)), 1e-6);
}

TEST(Transfer, AntiResonanceIsMinimum)
{
    auto fp = lossless(std::sqrt(0.95), 1.001);
    const double anti = std::numbers::pi / (2.0 * fp.tau);
    const double t_min = full::transfer_sq_closed(fp, anti);
    for (int i = 0; i <= 400; ++i) {
        const double w = std::numbers::pi / fp.tau * i / 400.0;
        EXPECT_GE(full::transfer_sq_closed(fp, w), t_min * (1.0 - 1e-12));
    }
}

TEST(Transfer, MatchesSingleModeAtSmallGain)
{
    CavityParams p;
    p.t_c = 0.01;
    const SqueezeSettings s{0.005, 1.0, 1.0};
    const auto fp = map_single_mode_to_full(p, s);
    const double sm = 4.0 * p.t_c / single_mode::denominator(p, s.q, 0.0);
    EXPECT_LT(rel(full::transfer_sq_closed(fp, 0.0), sm), 0.01);
}

TEST(ThresholdGain, Examples)
{
    FullModelParams fp;
    fp.r_c = std::sqrt(0.99);
    EXPECT_NEAR(full::threshold_gain(fp), std::pow(0.99, -0.25), 1e-15);
    EXPECT_NEAR(full::threshold_gain(fp), 1.0025157, 1e-7);
    EXPECT_NEAR(full::threshold_exponent(fp), -0.5 * std::log(0.99), 1e-15);
    // as a single-mode gain: 4 ln G_th against q_th = 0.01
    EXPECT_NEAR(4.0 * std::log(full::threshold_gain(fp)), 0.01, 0.01 * 0.01);

    fp.r_c = 1.0;
    EXPECT_DOUBLE_EQ(full::threshold_gain(fp), 1.0);

    fp.r_c = std::sqrt(0.99);
    fp.r_int = std::sqrt(0.001);
    EXPECT_NEAR(full::threshold_gain(fp), std::pow(0.99 * 0.999, -0.25), 1e-15);
    EXPECT_NEAR(4.0 * std::log(full::threshold_gain(fp)), 0.011, 0.011 * 0.011);
}

TEST(Sensitivity, StrainReferencedFromNoiseOverTransfer)
{
    CavityParams p;
    p.t_c = 0.01;
    const double s = full::sensitivity(p, SqueezeSettings{0.0, 1.0, 1.0}, 0.0);
    const double expected = strain_prefactor(p) * std::pow(1.0 - std::sqrt(0.99), 2) / 0.01;
    EXPECT_NEAR(s / expected, 1.0, 1e-10);
}
