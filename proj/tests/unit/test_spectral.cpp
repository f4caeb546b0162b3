#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "impdelay/errors.hpp"
#include "impdelay/spectral.hpp"

using namespace impdelay;

namespace {

// Composite Simpson rule, independent of the closed forms under test.
template <class F>
double simpson(F f, double a, double b, int n = 2000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

SpectralOperator random_operator(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> u(0.01, 50.0);
    std::vector<double> l(n);
    for (auto& x : l) x = u(rng);
    std::sort(l.begin(), l.end());
    return SpectralOperator(l);
}

}  // namespace

TEST(SpectralOperator, RejectsBadSpectra) {
    EXPECT_THROW(SpectralOperator({}), InvalidInput);
    EXPECT_THROW(SpectralOperator({2.0, 1.0}), InvalidInput);
    EXPECT_THROW(SpectralOperator({1.0, NAN}), InvalidInput);
    EXPECT_THROW(SpectralOperator({1.0}, 0.5), InvalidInput);
}

TEST(SpectralOperator, DirichletLaplacianIsSquares) {
    const auto op = SpectralOperator::dirichlet_laplacian(16);
    ASSERT_EQ(op.dimension(), 16u);
    for (int j = 1; j <= 16; ++j) EXPECT_EQ(op.eigenvalues()[j - 1], double(j * j));
    EXPECT_EQ(growth_exponent(op), -1.0);
}

TEST(SpectralOperator, UnstableSpectrumIsRepresentableButRejected) {
    SpectralOperator op({-1.0, 2.0});
    EXPECT_FALSE(op.exponentially_stable());
    EXPECT_THROW(op.require_exponentially_stable(), NotExponentiallyStable);
    EXPECT_THROW(inv_I_minus_T_omega(op, 1.0, StateVector::Ones(2)), NotExponentiallyStable);
    EXPECT_THROW(SpectralOperator({0.0}).require_exponentially_stable(), NotExponentiallyStable);
}

TEST(Semigroup, IdentityAtZeroAndLawOnRandomOperators) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> t(0.0, 3.0), c(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto op = random_operator(rng, 1 + trial % 32);
        StateVector v(op.dimension());
        for (auto& x : v) x = c(rng);
        const double s = t(rng), u = t(rng);
        EXPECT_EQ(semigroup_apply(op, 0.0, v), v);
        const StateVector lhs = semigroup_apply(op, s, semigroup_apply(op, u, v));
        const StateVector rhs = semigroup_apply(op, s + u, v);
        EXPECT_LE((lhs - rhs).norm(), 1e-12 * std::max(1e-300, rhs.norm()) + 1e-300);
        const double bound = op.growth_bound() * std::exp(growth_exponent(op) * s) * v.norm();
        EXPECT_LE(semigroup_apply(op, s, v).norm(), bound * (1.0 + 1e-12));
    }
}

TEST(Semigroup, RejectsNegativeTimeAndWrongDimension) {
    SpectralOperator op({1.0, 4.0});
    EXPECT_THROW(semigroup_apply(op, -1.0, StateVector::Ones(2)), InvalidInput);
    EXPECT_THROW(semigroup_apply(op, 1.0, StateVector::Ones(3)), InvalidInput);
}

TEST(Semigroup, ResolventOfMonodromy) {
    SpectralOperator op({1e-9, 1.0, 9.0});
    const StateVector v = StateVector::Ones(3);
    const StateVector x = inv_I_minus_T_omega(op, 2.0, v);
    // (I - T) x = v checked in the forward direction.
    for (int j = 0; j < 3; ++j) {
        const double l = op.eigenvalues()[j];
        EXPECT_NEAR(x[j] * -std::expm1(-l * 2.0), 1.0, 1e-12);
    }
    EXPECT_NEAR(x[0], 1.0 / (2e-9), 1.0);
}

TEST(EtdWeights, MatchQuadratureOnBothBranches) {
    for (double lambda : {1e-6, 0.3, 1.0, 20.0, 256.0, 4000.0}) {
        for (double h : {1e-4, 1e-3, 0.05, 0.5}) {
            SpectralOperator op({lambda});
            const auto w = EtdWeights::compute(op, h);
            const int n = 2 * std::max(1000, static_cast<int>(40.0 * lambda * h));
            const double w0 =
                simpson([&](double s) { return std::exp(-lambda * (h - s)); }, 0.0, h, n);
            const double w1 =
                simpson([&](double s) { return std::exp(-lambda * (h - s)) * s / h; }, 0.0, h, n);
            EXPECT_NEAR(w.decay[0], std::exp(-lambda * h), 1e-15);
            EXPECT_NEAR(w.w0[0], w0, 1e-10 * h) << lambda << " " << h;
            EXPECT_NEAR(w.w1[0], w1, 1e-10 * h) << lambda << " " << h;
        }
    }
}

TEST(EtdWeights, ContinuousAcrossSeriesThreshold) {
    const double h = 1.0;
    const auto below = EtdWeights::compute(SpectralOperator({std::nextafter(0.1, 0.0)}), h);
    const auto above = EtdWeights::compute(SpectralOperator({std::nextafter(0.1, 1.0)}), h);
    EXPECT_NEAR(below.w0[0], above.w0[0], 1e-14);
    EXPECT_NEAR(below.w1[0], above.w1[0], 1e-14);
    EXPECT_THROW(EtdWeights::compute(SpectralOperator({1.0}), 0.0), InvalidInput);
}
