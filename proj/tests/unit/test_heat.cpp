#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "impdelay/errors.hpp"
#include "impdelay/heat.hpp"

using namespace impdelay;

namespace {

constexpr double kPi = std::numbers::pi;

HeatConfig small_config(int modes) {
    HeatConfig cfg;
    cfg.n_modes = modes;
    cfg.grid_step = 2.0 * kPi / 400.0;
    cfg.periods = 3;
    cfg.spot_samples = 50;
    return cfg;
}

}  // namespace

TEST(Heat, SingleModeProblem) {
    const auto p = build_heat_problem(small_config(1));
    EXPECT_EQ(p.dimension(), 1u);
    EXPECT_EQ(p.op.eigenvalues()[0], 1.0);
    EXPECT_NEAR(p.impulses.time(0), kPi / 2.0, 1e-15);
    EXPECT_NEAR(p.impulses.time(1), 3.0 * kPi / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(*p.nonlinearity.declared.c1, 0.25);
    EXPECT_NEAR(*p.nonlinearity.declared.c2, (1.0 - std::exp(-0.4)) / 4.0, 1e-15);
    ASSERT_TRUE(p.impulses.lipschitz());
    EXPECT_NEAR(p.impulses.lipschitz()->at(0), kPi / 2.0, 1e-15);
}

TEST(Heat, TransformRoundTrip) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n : {1, 2, 7, 16}) {
        Eigen::VectorXd c(n);
        for (auto& x : c) x = u(rng);
        EXPECT_LT((heat_to_spectral(heat_to_physical(c)) - c).norm(), 1e-13);
    }
    // The first mode sampled at x = pi/2 is sqrt(2/pi).
    EXPECT_NEAR(heat_to_physical(Eigen::VectorXd::Ones(1))[0], std::sqrt(2.0 / kPi), 1e-15);
}

TEST(Heat, SingleModeImpulseMatchesClosedForm) {
    const auto p = build_heat_problem(small_config(1));
    for (double c : {-0.7, 0.0, 0.3, 2.0}) {
        const double s = std::sqrt(2.0 / kPi);
        const double expected = s * (kPi / 2.0) * (kPi / 2.0) * (std::exp(std::sin(c * s)) - 1.0);
        EXPECT_NEAR(p.impulses.apply(0, StateVector::Constant(1, c))[0], expected, 1e-14);
    }
}

TEST(Heat, ConservativeConstantLosesTheMargins) {
    auto cfg = small_config(2);
    cfg.impulse_constant = ImpulseConstant::conservative;
    const auto p = build_heat_problem(cfg);
    EXPECT_NEAR(p.impulses.lipschitz()->at(1), std::numbers::e * kPi / 2.0, 1e-14);
    const auto report = run_heat_pipeline(cfg);
    EXPECT_LT(report.hypotheses.H3_margin, 0.0);
    ASSERT_TRUE(report.periodic);
    EXPECT_FALSE(report.periodic->contraction_verified);
    EXPECT_EQ(report.stability, CertificateStatus::inapplicable);
}

TEST(Heat, LongDelayKeepsExistenceButNotStability) {
    auto cfg = small_config(2);
    cfg.delay_r = 1.0;
    const auto r = report_from_constants(1.0, -1.0, 2.0 * kPi, 1.0, 0.0, 0.25,
                                         0.25 * (1.0 - std::exp(-4.0)), {kPi / 2.0, kPi / 2.0});
    EXPECT_GT(r.H3_margin, 0.0);
    EXPECT_LT(r.H3prime_margin, 0.0);
    const auto report = run_heat_pipeline(cfg);
    EXPECT_NEAR(report.hypotheses.H3_margin, r.H3_margin, 1e-14);
    EXPECT_EQ(report.stability, CertificateStatus::inapplicable);
}

TEST(Heat, UnforcedPipelineHasZeroOrbitAndPassingCertificate) {
    const auto report = run_heat_pipeline(small_config(4));
    ASSERT_TRUE(report.periodic);
    EXPECT_EQ(report.periodic->one_period.pc_norm(), 0.0);
    ASSERT_TRUE(report.decay);
    EXPECT_EQ(report.decay->violations, 0u);
    EXPECT_EQ(report.stability, CertificateStatus::passed);
    EXPECT_EQ(report.stage, "stability");
}

TEST(Heat, ForcedPipelineConvergesAndAgreesWithPoincare) {
    auto cfg = small_config(4);
    cfg.forcing = true;
    cfg.periods = 40;
    const auto report = run_heat_pipeline(cfg);
    ASSERT_TRUE(report.periodic);
    EXPECT_GT(report.periodic->one_period.pc_norm(), 0.1);
    EXPECT_LE(report.periodic->differences.back(), cfg.tol);
    EXPECT_LE(report.periodic->measured_ratio, report.hypotheses.kappa + 0.05);
    EXPECT_LT(report.poincare_gap, 1e-7);
}

TEST(Heat, RejectsBadConfigurations) {
    auto cfg = small_config(0);
    EXPECT_THROW(build_heat_problem(cfg), ConfigurationError);
    cfg = small_config(2);
    cfg.grid_step = 0.3;
    EXPECT_THROW(heat_integrator(cfg), ConfigurationError);
    cfg = small_config(2);
    cfg.history = HistoryKind::samples;
    EXPECT_THROW(heat_initial_history(cfg, 0.01), ConfigurationError);
}
