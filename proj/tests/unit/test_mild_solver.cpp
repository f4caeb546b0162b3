#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "impdelay/errors.hpp"
#include "impdelay/mild_solver.hpp"

using namespace impdelay;

namespace {

StateVector scalar(double x) { return StateVector::Constant(1, x); }

ProblemSpec scalar_problem(double lambda, ForcingFunction f, double omega = 1.0, double r = 0.1,
                           ImpulseSchedule impulses = ImpulseSchedule(1.0)) {
    Nonlinearity nl;
    nl.eval = std::move(f);
    nl.period_omega = omega;
    return ProblemSpec(SpectralOperator({lambda}), nl, std::move(impulses), r, omega);
}

IntegratorConfig config(double h, Scheme s = Scheme::etd2) {
    IntegratorConfig c;
    c.grid_step = h;
    c.scheme = s;
    return c;
}

double max_error(const Trajectory& tr, double (*exact)(double)) {
    double err = 0.0;
    for (long j = tr.first_node(); j <= tr.last_node(); ++j) {
        err = std::max(err, std::abs(tr.sample(j)[0] - exact(tr.time(j))));
    }
    return err;
}

}  // namespace

TEST(IntegrateIvp, PureDecayIsExact) {
    const auto p = scalar_problem(1.0, [](double, const StateVector& x, const HistorySegment&) {
        return StateVector(StateVector::Zero(x.size()));
    });
    for (Scheme s : {Scheme::etd1, Scheme::etd2}) {
        const auto tr = integrate_ivp(p, HistorySegment::constant(0.1, 0.01, scalar(1.0)), 5.0, config(0.01, s));
        for (long j = 0; j <= tr.last_node(); ++j) {
            EXPECT_NEAR(tr.sample(j)[0], std::exp(-tr.time(j)), 1e-14);
        }
    }
}

TEST(IntegrateIvp, Etd2IsExactForAffineForcing) {
    // u' + 2u = 3 + t, u(0) = 0  =>  u = (3 + t)/2 - 1/4 + (1/4 - 3/2) e^{-2t}.
    const auto p = scalar_problem(2.0, [](double t, const StateVector&, const HistorySegment&) {
        return scalar(3.0 + t);
    });
    const auto tr = integrate_ivp(p, HistorySegment::constant(0.1, 0.1, scalar(0.0)), 2.0, config(0.1));
    const double err = max_error(tr, [](double t) {
        return (3.0 + t) / 2.0 - 0.25 + (0.25 - 1.5) * std::exp(-2.0 * t);
    });
    EXPECT_LT(err, 1e-13);
}

TEST(IntegrateIvp, ConvergenceOrdersOnStateDependentProblem) {
    // u' = (-1 + sin t / 2) u, u(0) = 1  =>  u = exp(-t - cos(t)/2 + 1/2).
    const double omega = 2.0 * M_PI;
    const auto p = scalar_problem(
        1.0, [](double t, const StateVector& x, const HistorySegment&) { return StateVector(0.5 * std::sin(t) * x); },
        omega, 0.1, ImpulseSchedule(omega));
    auto exact = [](double t) { return std::exp(-t - 0.5 * std::cos(t) + 0.5); };
    auto err = [&](long n, Scheme s) {
        const double h = omega / n;
        const auto tr = integrate_ivp(p, HistorySegment::constant(0.1, h, scalar(1.0)), omega, config(h, s));
        double e = 0.0;
        for (long j = 0; j <= tr.last_node(); ++j) e = std::max(e, std::abs(tr.sample(j)[0] - exact(tr.time(j))));
        return e;
    };
    const double r1 = err(400, Scheme::etd1) / err(800, Scheme::etd1);
    const double r2 = err(400, Scheme::etd2) / err(800, Scheme::etd2);
    EXPECT_NEAR(r1, 2.0, 0.15);
    EXPECT_NEAR(r2, 4.0, 0.3);
    EXPECT_LT(err(800, Scheme::etd2), 1e-4);
}

TEST(IntegrateIvp, MethodOfStepsOracleForPointDelay) {
    // u' = -u + c u(t - r), phi = 1: on [0, r] u = c + (1 - c) e^{-t};
    // on [r, 2r] u = c^2 + c (1 - c) e^{r} (t - r) e^{-t} + K e^{-t}.
    const double c = 0.5, r = 0.1;
    const auto p = scalar_problem(1.0, [c](double, const StateVector&, const HistorySegment& phi) {
        return StateVector(c * phi.value_at(-phi.delay()));
    });
    const auto tr = integrate_ivp(p, HistorySegment::constant(r, 1e-3, scalar(1.0)), 0.2, config(1e-3));
    const double u_r = c + (1.0 - c) * std::exp(-r);
    const double K = (u_r - c * c) * std::exp(r);
    for (long j = 0; j <= tr.last_node(); ++j) {
        const double t = tr.time(j);
        const double exact = t <= r + 1e-12 ? c + (1.0 - c) * std::exp(-t)
                                            : c * c + c * (1.0 - c) * std::exp(r) * (t - r) * std::exp(-t) +
                                                  K * std::exp(-t);
        EXPECT_NEAR(tr.sample(j)[0], exact, 5e-8) << t;
    }
}

TEST(IntegrateIvp, DelayNotMultipleOfStepUsesInterpolatedHistory) {
    // Same oracle on [0, r] with h = 3e-3 not dividing r = 0.1; phi linear so the
    // interpolated t - r value is exact: u' = -u + phi(t - r), phi(s) = 1 + s.
    const double r = 0.1;
    const auto p = scalar_problem(1.0, [](double, const StateVector&, const HistorySegment& phi) {
        return StateVector(phi.value_at(-phi.delay()));
    }, 0.9, r, ImpulseSchedule(0.9));
    const double h = 0.9 / 300.0;
    const auto phi = HistorySegment::sample(r, h, 1, [](double s) { return scalar(1.0 + s); });
    const auto tr = integrate_ivp(p, phi, 0.09, config(h));
    // u' + u = 1 + t - r on [0, r], u(0) = 1  =>  u = t - r + (1 + r) e^{-t}.
    for (long j = 0; j <= tr.last_node(); ++j) {
        const double t = tr.time(j);
        EXPECT_NEAR(tr.sample(j)[0], t - r + (1.0 + r) * std::exp(-t), 1e-12) << t;
    }
}

TEST(IntegrateIvp, ImpulseLeftAndRightLimits) {
    const auto doubling = ImpulseSchedule(1.0, {0.5}, {[](const StateVector& x) { return StateVector(x); }});
    const auto p = scalar_problem(1.0, [](double, const StateVector& x, const HistorySegment&) {
        return StateVector(StateVector::Zero(x.size()));
    }, 1.0, 0.1, doubling);
    const auto tr = integrate_ivp(p, HistorySegment::constant(0.1, 0.01, scalar(1.0)), 1.0, config(0.01));
    ASSERT_EQ(tr.jumps().size(), 1u);
    EXPECT_EQ(tr.jumps()[0].node, 50);
    EXPECT_NEAR(tr.sample(50)[0], std::exp(-0.5), 1e-14);
    EXPECT_NEAR(tr.right_limit(50)[0], 2.0 * std::exp(-0.5), 1e-14);
    EXPECT_NEAR(tr.sample(100)[0], 2.0 * std::exp(-1.0), 1e-14);

    // A jump exactly at t_end is recorded but the sample stays the left limit.
    const auto end = integrate_ivp(p, HistorySegment::constant(0.1, 0.01, scalar(1.0)), 0.5, config(0.01));
    ASSERT_EQ(end.jumps().size(), 1u);
    EXPECT_NEAR(end.sample(end.last_node())[0], std::exp(-0.5), 1e-14);
}

TEST(IntegrateIvp, NumericFailureCarriesTime) {
    const auto p = scalar_problem(1.0, [](double t, const StateVector& x, const HistorySegment&) {
        return t > 0.3 ? scalar(std::numeric_limits<double>::quiet_NaN()) : StateVector(x);
    });
    try {
        integrate_ivp(p, HistorySegment::constant(0.1, 0.01, scalar(1.0)), 1.0, config(0.01));
        FAIL() << "expected NumericFailure";
    } catch (const NumericFailure& e) {
        EXPECT_NEAR(e.time(), 0.31, 0.011);
    }
}

TEST(IntegrateIvp, ValidatesInputs) {
    const auto p = scalar_problem(1.0, [](double, const StateVector& x, const HistorySegment&) {
        return StateVector(x);
    });
    const auto phi = HistorySegment::constant(0.1, 0.01, scalar(1.0));
    EXPECT_THROW(integrate_ivp(p, phi, 0.305, config(0.01)), ConfigurationError);
    EXPECT_THROW(integrate_ivp(p, phi, 1.0, config(0.3)), ConfigurationError);
    EXPECT_THROW(integrate_ivp(p, HistorySegment::constant(0.1, 0.01, StateVector::Ones(2)), 1.0, config(0.01)),
                 InvalidInput);
    EXPECT_THROW(integrate_ivp(p, HistorySegment::constant(0.2, 0.01, scalar(1.0)), 1.0, config(0.01)),
                 InvalidInput);
}
