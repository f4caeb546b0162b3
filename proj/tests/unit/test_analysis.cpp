#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "impdelay/analysis.hpp"
#include "impdelay/errors.hpp"

using namespace impdelay;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector scalar(double x) { return StateVector::Constant(1, x); }

IntegratorConfig config(double h) {
    IntegratorConfig c;
    c.grid_step = h;
    return c;
}

HypothesisReport heat_constants() {
    const double c2 = (1.0 - std::exp(-0.4)) / 4.0;
    return report_from_constants(1.0, -1.0, 2.0 * kPi, 0.1, 0.0, 0.25, c2, {kPi / 2.0, kPi / 2.0},
                                 {kPi / 2.0, 3.0 * kPi / 2.0});
}

ProblemSpec linear_scalar(double gain, double declared_c1) {
    Nonlinearity f;
    f.period_omega = 1.0;
    f.eval = [gain](double, const StateVector& x, const HistorySegment&) { return StateVector(gain * x); };
    f.declared = {0.0, declared_c1, 0.0};
    return ProblemSpec(SpectralOperator({1.0}), f, ImpulseSchedule(1.0), 0.1, 1.0);
}

}  // namespace

TEST(Hypotheses, HeatArithmetic) {
    const auto r = heat_constants();
    // Hand evaluation of the margins from c1 = 1/4, c2 = (1 - e^{-0.4})/4, a_k = pi/2.
    const double c2 = (1.0 - std::exp(-0.4)) / 4.0;
    EXPECT_NEAR(r.c2, 0.0824199885, 1e-9);
    EXPECT_NEAR(r.H3_margin, 1.0 - (0.25 + c2) - 0.5, 1e-9);
    EXPECT_NEAR(r.H3_margin, 0.1676, 1e-3);
    EXPECT_NEAR(r.H3prime_margin, 0.1589, 1e-3);
    EXPECT_NEAR(r.sigma, 0.358, 1e-3);
    EXPECT_NEAR(r.kappa, 0.832, 1e-3);
    EXPECT_TRUE(r.h3_holds());
    EXPECT_TRUE(r.h3prime_holds());
    // Both impulses half a period apart: sum over lags 0 and pi.
    const double worst = kPi / 2.0 * (1.0 + std::exp(-kPi));
    EXPECT_NEAR(r.kappa_sup, 0.25 + c2 + worst / (1.0 - std::exp(-2.0 * kPi)), 1e-12);
}

TEST(Hypotheses, RejectsInvalidConstants) {
    EXPECT_THROW(report_from_constants(0.5, -1.0, 1.0, 0.1, 0.0, 0.1, 0.1, {}), InvalidInput);
    EXPECT_THROW(report_from_constants(1.0, -1.0, 0.0, 0.1, 0.0, 0.1, 0.1, {}), InvalidInput);
    EXPECT_THROW(report_from_constants(1.0, -1.0, 1.0, 0.1, 0.0, -0.1, 0.1, {}), InvalidInput);
    EXPECT_THROW(report_from_constants(1.0, -1.0, 1.0, 0.1, 0.0, 0.1, 0.1, {-1.0}), InvalidInput);
}

TEST(Hypotheses, MonotonicityAndOrderingOnRandomConstants) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double M = 1.0 + 2.0 * u(rng), nu0 = -0.05 - 3.0 * u(rng), omega = 0.5 + 6.0 * u(rng);
        const double r = 2.0 * u(rng), c1 = u(rng), c2 = u(rng);
        std::vector<double> a{u(rng), u(rng)};
        const auto base = report_from_constants(M, nu0, omega, r, 0.0, c1, c2, a);
        const double d = 0.01 + 0.1 * u(rng);
        std::vector<double> a_up = a;
        a_up[trial % 2] += d;
        for (const auto& bigger : {report_from_constants(M, nu0, omega, r, 0.0, c1 + d, c2, a),
                                   report_from_constants(M, nu0, omega, r, 0.0, c1, c2 + d, a),
                                   report_from_constants(M, nu0, omega, r, 0.0, c1, c2, a_up)}) {
            EXPECT_LT(bigger.H3_margin, base.H3_margin);
            EXPECT_LT(bigger.H3prime_margin, base.H3prime_margin);
            EXPECT_LT(bigger.sigma, base.sigma);
            EXPECT_GT(bigger.kappa, base.kappa);
        }
        // A longer delay only hurts (H3') and sigma.
        const auto longer = report_from_constants(M, nu0, omega, r + d, 0.0, c1, c2, a);
        EXPECT_EQ(longer.H3_margin, base.H3_margin);
        EXPECT_LE(longer.H3prime_margin, base.H3prime_margin);
        EXPECT_LE(longer.sigma, base.sigma);
        // Orderings: (H3') implies (H3); kappa < 1 iff (H3); sigma >= M (H3') since ln(1 + x) <= x.
        EXPECT_LE(base.H3prime_margin, base.H3_margin + 1e-15);
        EXPECT_NEAR(base.kappa, 1.0 - M / std::abs(nu0) * base.H3_margin, 1e-12);
        EXPECT_GE(base.sigma, M * base.H3prime_margin - 1e-12);
        EXPECT_LE(base.sigma, std::abs(nu0) + 1e-15);
        EXPECT_GE(base.kappa_sup, base.kappa - 1e-12);
    }
}

TEST(Gronwall, ClosedFormValues) {
    EXPECT_DOUBLE_EQ(gronwall_bound(1.0, 0.0, 0.0, {}, 3.0), 1.0);
    EXPECT_NEAR(gronwall_bound(2.0, 0.5, 0.5, {{0.5, 1.0}, {2.5, 5.0}}, 2.0), 2.0 * 2.0 * std::exp(2.0), 1e-12);
    // The impulse at t itself is not yet counted.
    EXPECT_NEAR(gronwall_bound(1.0, 0.0, 0.0, {{1.0, 1.0}}, 1.0), 1.0, 1e-15);
    EXPECT_THROW(gronwall_bound(-1.0, 0.0, 0.0, {}, 1.0), InvalidInput);
    EXPECT_THROW(gronwall_bound(1.0, 0.0, 0.0, {{1.0, 1.0}, {0.5, 1.0}}, 2.0), InvalidInput);
}

TEST(Gronwall, DominatesRandomEqualityRecursions) {
    // Discrete equality case of the integral inequality:
    //   y(t) = y0 + sum_{s < t} dt (alpha1 y(s) + alpha2 max_{[s - r, s]} y) + sum_{t_k < t} beta_k y(t_k),
    // with y = y0 on [-r, 0]. Left Riemann sums make it a forward recursion.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double y0 = 0.1 + 2.0 * u(rng), a1 = u(rng), a2 = u(rng), r = 0.5 * u(rng);
        const double dt = 1e-3, T = 4.0;
        const long n = static_cast<long>(std::lround(T / dt));
        const long lag = static_cast<long>(std::lround(r / dt));
        std::vector<std::pair<double, double>> beta;
        std::vector<long> beta_nodes;
        for (long k = 1 + static_cast<long>(u(rng) * 500.0); k < n; k += 300 + static_cast<long>(u(rng) * 700.0)) {
            beta_nodes.push_back(k);
            beta.emplace_back(k * dt, 0.5 * u(rng));
        }
        std::vector<double> y(n + 1, y0);
        double integral = 0.0, jumps = 0.0;
        std::size_t next = 0;
        for (long j = 0; j < n; ++j) {
            double window_max = y0;
            for (long i = std::max(0L, j - lag); i <= j; ++i) window_max = std::max(window_max, y[i]);
            integral += dt * (a1 * y[j] + a2 * window_max);
            if (next < beta_nodes.size() && beta_nodes[next] == j) jumps += beta[next++].second * y[j];
            y[j + 1] = y0 + integral + jumps;
        }
        for (long j = 0; j <= n; ++j) {
            if (y[j] > gronwall_bound(y0, a1, a2, beta, j * dt) * (1.0 + 1e-12)) ++violations;
        }
    }
    EXPECT_EQ(violations, 0u);
}

TEST(SpotCheck, AcceptsTrueConstantsAndCatchesFalseOnes) {
    const auto ok = build_report(linear_scalar(0.5, 0.5), 1.0, {200, 1, 1.0});
    EXPECT_TRUE(ok.constants_verified);
    EXPECT_EQ(ok.violation_count, 0u);
    EXPECT_EQ(ok.samples_checked, 200u);

    const auto bad = build_report(linear_scalar(0.5, 0.25), 1.0, {200, 1, 1.0});
    EXPECT_FALSE(bad.constants_verified);
    EXPECT_GT(bad.violation_count, 0u);
    ASSERT_FALSE(bad.violations.empty());
    EXPECT_LE(bad.violations.size(), 5u);
    // Arithmetic is unaffected by the spot check.
    EXPECT_DOUBLE_EQ(bad.c1, 0.25);
}

TEST(FittedDecayRate, RecoversSlopeFromSecondHalf) {
    std::vector<double> t, e;
    for (int i = 0; i <= 100; ++i) {
        t.push_back(0.1 * i);
        e.push_back(i < 50 ? 1.0 : 3.0 * std::exp(-0.7 * t.back()));
    }
    EXPECT_NEAR(fitted_decay_rate(t, e), 0.7, 1e-12);
    EXPECT_TRUE(std::isnan(fitted_decay_rate({1.0}, {1.0})));
}

TEST(DecayExperiment, PureDecayFitsUnitRate) {
    const auto p = linear_scalar(0.0, 0.0);
    const double h = 1e-3;
    const auto ustar = picard_periodic(p, nullptr, {}, config(h));
    const auto rec = decay_experiment(p, ustar, HistorySegment::constant(0.1, h, scalar(1.0)), 10, config(h));
    EXPECT_TRUE(rec.applicable);
    EXPECT_NEAR(rec.sigma, 1.0, 1e-15);
    EXPECT_EQ(rec.violations, 0u);
    EXPECT_NEAR(rec.fitted_rate, 1.0, 0.01);
    EXPECT_TRUE(rec.bound_holds());
}

TEST(DecayExperiment, InapplicableWithoutStabilityMargin) {
    const auto p = linear_scalar(0.0, 2.0);
    const double h = 1e-2;
    const auto ustar = picard_periodic(p, nullptr, {}, config(h));
    const auto rec = decay_experiment(p, ustar, HistorySegment::constant(0.1, h, scalar(1.0)), 2, config(h));
    EXPECT_FALSE(rec.applicable);
    EXPECT_FALSE(rec.bound_holds());
}

TEST(Hypotheses, HeatStabilityMarginPositiveBelowStatedDelayBound) {
    // Heat problem: (H3') is claimed for 0 < r < lambda_1 ln 4 / (lambda_1^2 + 4) = ln(4)/5.
    const double bound = std::log(4.0) / 5.0;
    for (double r = 0.01; r < bound; r += 0.01) {
        const double c2 = (1.0 - std::exp(-4.0 * r)) / 4.0;
        const auto rep = report_from_constants(1.0, -1.0, 2.0 * kPi, r, 0.0, 0.25, c2, {kPi / 2.0, kPi / 2.0});
        EXPECT_GT(rep.H3prime_margin, 0.0) << r;
    }
    const auto far = report_from_constants(1.0, -1.0, 2.0 * kPi, 0.4, 0.0, 0.25, (1.0 - std::exp(-1.6)) / 4.0,
                                           {kPi / 2.0, kPi / 2.0});
    EXPECT_LT(far.H3prime_margin, 0.0);
}
