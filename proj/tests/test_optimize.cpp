#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "squeezelim/optimize.hpp"

using namespace squeezelim;

namespace
{

CavityParams cavity(double eps_int, double eps_read)
{
    CavityParams p;
    p.t_c = 0.01;
    p.eps_int = eps_int;
    p.eps_read = eps_read;
    return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(NumericOptimalGain, MatchesAnalyticOptimum)
{
    for (double er : {0.01, 0.05, 0.1, 0.3}) {
        for (double beta : {1.0, 4.0, 31.6227766}) {
            const auto p = cavity(0.001, er);
            const auto r = numeric_optimal_gain(p, SqueezeSettings{0.0, beta, 1.0}, 0.0, Model::single_mode);
            const auto opt = single_mode::optimal_sensitivity(p, beta);
            ASSERT_FALSE(opt.clamped);
            EXPECT_NEAR(r.q_star, opt.q, 1e-6) << "eps_read=" << er << " beta=" << beta;
            EXPECT_LT(rel(r.s_star, opt.sensitivity), 1e-8);
            EXPECT_TRUE(r.converged);
            EXPECT_FALSE(r.clamped);
        }
    }
}

TEST(NumericOptimalGain, LosslessRunsIntoThreshold)
{
    const auto p = cavity(0.0, 0.0);
    const auto r = numeric_optimal_gain(p, SqueezeSettings{0.0, 1.0, 1.0}, 0.0, Model::single_mode);
    EXPECT_TRUE(r.clamped);
    EXPECT_NEAR(r.q_star, 0.01 * (1.0 - 1e-6), 1e-9);
    EXPECT_LT(r.s_star, 1e-10 * strain_prefactor(p));
    EXPECT_GT(r.s_star, 0.0);
}

TEST(NumericOptimalGain, StrongSqueezingAmplifiesInside)
{
    const auto p = cavity(0.001, 0.1);
    const auto r = numeric_optimal_gain(p, SqueezeSettings{0.0, 1e6, 1.0}, 0.0, Model::single_mode);
    EXPECT_LT(r.q_star, -0.011 * 0.999);
    EXPECT_LT(rel(r.s_star, strain_prefactor(p) * 0.001), 0.01);
}

TEST(NumericOptimalGain, StarBeatsBracketEnds)
{
    const auto p = cavity(0.002, 0.07);
    const SqueezeSettings s{0.0, 10.0, 2.0};
    const auto r = numeric_optimal_gain(p, s, 0.0, Model::full);
    const double lim = threshold_gain_sm(p) * (1.0 - 1e-6);
    EXPECT_LE(r.s_star, sensitivity(p, SqueezeSettings{lim, 10.0, 2.0}, 0.0, Model::full));
    EXPECT_LE(r.s_star, sensitivity(p, SqueezeSettings{-lim, 10.0, 2.0}, 0.0, Model::full));
}

TEST(NumericOptimalGain, ClampedFlagFollowsAnalyticClamp)
{
    // beta large enough that the analytic optimum sits beyond -q_th
    CavityParams p = cavity(0.0, 0.5);
    const double q = single_mode::optimal_gain_unclamped(p, 1e3);
    bool clamped = false;
    single_mode::clamp_gain(p, q, clamped);
    const auto r = numeric_optimal_gain(p, SqueezeSettings{0.0, 1e3, 1.0}, 0.0, Model::single_mode);
    EXPECT_EQ(r.clamped, clamped);

    p = cavity(0.001, 0.1);
    const auto inside = numeric_optimal_gain(p, SqueezeSettings{0.0, 31.6, 1.0}, 0.0, Model::single_mode);
    EXPECT_FALSE(inside.clamped);
}

TEST(Bandwidth, LorentzianHalfWidth)
{
    CavityParams p = cavity(0.0, 0.0);
    p.tau = 1e-8;
    const auto b = bandwidth(p, SqueezeSettings{}, Model::single_mode);
    EXPECT_LT(rel(b.omega_hwhm, 2.5e5), 1e-9);
    EXPECT_LT(rel(b.s_peak, strain_prefactor(p) * 0.01 / 4.0), 1e-12);
    EXPECT_DOUBLE_EQ(b.sbp, b.omega_hwhm / b.s_peak);
}

TEST(Bandwidth, DoublingHoldsAtReturnedFrequency)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        CavityParams p = cavity(0.003 * u(rng), 0.3 * u(rng));
        p.eps_inj = 0.1 * u(rng);
        const SqueezeSettings s{(-0.95 + 1.9 * u(rng)) * threshold_gain_sm(p), 1.0 + 30.0 * u(rng),
                                1.0 + 3.0 * u(rng)};
        for (Model m : {Model::single_mode, Model::full}) {
            const auto b = bandwidth(p, s, m);
            ASSERT_GT(b.omega_hwhm, 0.0);
            ASSERT_LT(rel(sensitivity(p, s, b.omega_hwhm, m), 2.0 * b.s_peak), 1e-8);
        }
    }
}

TEST(Bandwidth, ShrinksTowardThreshold)
{
    const auto p = cavity(0.0, 0.0);
    const double b0 = bandwidth(p, SqueezeSettings{}, Model::single_mode).omega_hwhm;
    const double b1 = bandwidth(p, SqueezeSettings{0.009, 1.0, 1.0}, Model::single_mode).omega_hwhm;
    EXPECT_LT(b1, b0);
    // S_hh - S_hh(0) is q independent, so HWHM = (T_c - q)/(4 tau) here
    EXPECT_LT(rel(b1, 0.001 / (4.0 * p.tau)), 1e-9);
}

TEST(Bandwidth, MonotoneUpToOptimalGain)
{
    for (double er : {0.0, 0.01, 0.05, 0.1}) {
        const auto p = cavity(0.0, er);
        const double q_end = er == 0.0 ? 0.999 * threshold_gain_sm(p) : single_mode::optimal_sensitivity(p, 1.0).q;
        double prev = INFINITY;
        for (int i = 0; i <= 40; ++i) {
            const double q = q_end * i / 40.0;
            const double b = bandwidth(p, SqueezeSettings{q, 1.0, 1.0}, Model::single_mode).omega_hwhm;
            ASSERT_LE(b, prev * (1.0 + 1e-12)) << "eps_read=" << er << " q=" << q;
            prev = b;
        }
    }
}

TEST(Bandwidth, SingleModeAgreesWithFullModel)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        CavityParams p = cavity(1e-3 * u(rng), 0.05 * u(rng));
        p.eps_inj = 0.05 * u(rng);
        const SqueezeSettings s{(-0.9 + 1.8 * u(rng)) * 0.01, 1.0 + 30.0 * u(rng), 1.0};
        const double sm = bandwidth(p, s, Model::single_mode).omega_hwhm;
        const double fm = bandwidth(p, s, Model::full).omega_hwhm;
        ASSERT_LT(rel(sm, fm), 0.02) << "draw " << i;
    }
}

TEST(Bandwidth, BracketFailureIsReported)
{
    // S_hh(W) - S_hh(0) grows like 16 W^2 tau^2; far outside the approximation
    // (readout-dominated, (q + T_c + eps_int)^2 > pi^2) no doubling occurs below pi/(4 tau)
    CavityParams p;
    p.t_c = 0.99;
    p.eps_int = 0.99;
    p.eps_read = 0.9;
    EXPECT_THROW(bandwidth(p, SqueezeSettings{1.9, 1.0, 1.0}, Model::single_mode), BracketError);
}

TEST(SnrGain, SelfReferenceIsUnity)
{
    const auto p = cavity(0.001, 0.1);
    EXPECT_DOUBLE_EQ(snr_gain(p, SqueezeSettings{0.0, 5.0, 1.0}, 1e4, Model::single_mode), 1.0);
}

TEST(SnrGain, LosslessThresholdIsCapped)
{
    const auto p = cavity(0.0, 0.0);
    const double q = 0.01 * (1.0 - 1e-9);
    EXPECT_EQ(snr_gain(p, SqueezeSettings{q, 1.0, 1.0}, 0.0, Model::single_mode), snr_gain_cap);
}

TEST(SnrGain, PeakMatchesAnalyticLimits)
{
    const auto p = cavity(0.001, 0.1);
    const auto opt = single_mode::optimal_sensitivity(p, 1.0);
    const double expected = single_mode::limit_q0(p, 1.0) / opt.sensitivity;
    EXPECT_LT(rel(snr_gain(p, SqueezeSettings{opt.q, 1.0, 1.0}, 0.0, Model::single_mode), expected), 1e-10);

    const auto r = numeric_optimal_gain(p, SqueezeSettings{0.0, 1.0, 1.0}, 0.0, Model::single_mode);
    EXPECT_LT(rel(snr_gain(p, SqueezeSettings{r.q_star, 1.0, 1.0}, 0.0, Model::single_mode), expected), 1e-6);
}

TEST(SbpGain, LosslessInternalSqueezingBeatsStandard)
{
    const auto p = cavity(0.0, 0.0);
    EXPECT_GT(sbp_gain(p, SqueezeSettings{0.0, 1.0, 1.0}, SbpReference::standard), 1.0);
}

TEST(SbpGain, UnityWhereOptimalGainVanishes)
{
    CavityParams p = cavity(1e-4, 0.0);
    const double beta = db_to_power(15.0);
    const auto er = sbp_unity_eps_read(p, beta);
    ASSERT_TRUE(er.has_value());
    p.eps_read = *er;
    const auto c = sbp_compare(p, SqueezeSettings{0.0, beta, 1.0}, SbpReference::external_only, Model::single_mode);
    EXPECT_NEAR(c.q_opt, 0.0, 1e-12);
    EXPECT_NEAR(c.sbp_ratio, 1.0, 1e-8);
}

TEST(SbpGain, BaselineRatioIsSqrtOfSensitivityGain)
{
    // single mode: S(W) - S(0) does not depend on q, so B ~ sqrt(S(0)) and
    // SBP ratio = sqrt(S_q0 / S_opt)
    const auto p = cavity(1e-4, 0.05);
    const double beta = db_to_power(15.0);
    const auto c = sbp_compare(p, SqueezeSettings{0.0, beta, 1.0}, SbpReference::external_only, Model::single_mode);
    const double s_q0 = single_mode::limit_q0(p, beta);
    const double s_opt = single_mode::optimal_sensitivity(p, beta).sensitivity;
    EXPECT_LT(rel(c.sbp_ratio, std::sqrt(s_q0 / s_opt)), 1e-8);
    EXPECT_GT(c.sbp_ratio, 1.0);
}

TEST(OptimalGain, FullModelNearSingleMode)
{
    const auto p = cavity(1e-4, 0.05);
    const SqueezeSettings s{0.0, db_to_power(10.0), 1.0};
    const double sm = optimal_gain(p, s, Model::single_mode);
    const double fm = optimal_gain(p, s, Model::full);
    EXPECT_NEAR(fm, sm, 0.02 * threshold_gain_sm(p));
}
