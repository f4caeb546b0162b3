#include "impdelay/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impdelay/errors.hpp"

namespace impdelay {

SpectralOperator::SpectralOperator(std::vector<double> eigenvalues, double growth_bound)
    : growth_bound_(growth_bound) {
    if (eigenvalues.empty()) {
        throw InvalidInput("spectral operator needs at least one eigenvalue");
    }
    for (double l : eigenvalues) {
        if (!std::isfinite(l)) throw InvalidInput("eigenvalues must be finite");
    }
    if (!std::is_sorted(eigenvalues.begin(), eigenvalues.end())) {
        throw InvalidInput("eigenvalues must be sorted ascending");
    }
    if (!(growth_bound >= 1.0) || !std::isfinite(growth_bound)) {
        throw InvalidInput("growth bound M must be a finite number >= 1");
    }
    eigenvalues_ = Eigen::Map<const Eigen::VectorXd>(eigenvalues.data(),
                                                     static_cast<Eigen::Index>(eigenvalues.size()));
}

SpectralOperator SpectralOperator::dirichlet_laplacian(std::size_t n_modes) {
    if (n_modes == 0) throw InvalidInput("need at least one mode");
    std::vector<double> lambda(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        double k = static_cast<double>(j + 1);
        lambda[j] = k * k;
    }
    return SpectralOperator(std::move(lambda));
}

void SpectralOperator::require_exponentially_stable() const {
    if (!exponentially_stable()) {
        throw NotExponentiallyStable("semigroup is not exponentially stable: lambda_1 = " +
                                     std::to_string(eigenvalues_[0]) + " <= 0");
    }
}

namespace {

void check_dimension(const SpectralOperator& op, const StateVector& v) {
    if (static_cast<std::size_t>(v.size()) != op.dimension()) {
        throw InvalidInput("state dimension " + std::to_string(v.size()) +
                           " does not match operator dimension " +
                           std::to_string(op.dimension()));
    }
}

}  // namespace

StateVector semigroup_apply(const SpectralOperator& op, double t, const StateVector& v) {
    check_dimension(op, v);
    if (!(t >= 0.0)) throw InvalidInput("semigroup time must be >= 0");
    return ((-op.eigenvalues().array() * t).exp() * v.array()).matrix();
}

double growth_exponent(const SpectralOperator& op) { return -op.smallest_eigenvalue(); }

StateVector inv_I_minus_T_omega(const SpectralOperator& op, double omega, const StateVector& v) {
    check_dimension(op, v);
    if (!(omega > 0.0)) throw InvalidInput("period must be > 0");
    op.require_exponentially_stable();
    // 1 - exp(-x) = -expm1(-x) keeps full precision for small lambda * omega.
    Eigen::ArrayXd denom = (-op.eigenvalues().array() * omega).unaryExpr(
        [](double x) { return -std::expm1(x); });
    return (v.array() / denom).matrix();
}

EtdWeights EtdWeights::compute(const SpectralOperator& op, double h) {
    if (!(h > 0.0)) throw InvalidInput("step must be > 0");
    const auto n = static_cast<Eigen::Index>(op.dimension());
    EtdWeights w{Eigen::ArrayXd(n), Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const double lambda = op.eigenvalues()[j];
        const double z = lambda * h;
        w.decay[j] = std::exp(-z);
        if (std::abs(z) < 0.1) {
            // w0/h = sum (-z)^k/(k+1)!, w1/h = sum (-z)^k/(k+2)!; the closed
            // form of w1 cancels catastrophically for small z.
            double term0 = 1.0;  // (-z)^k / (k+1)!
            double term1 = 0.5;  // (-z)^k / (k+2)!
            double s0 = 0.0, s1 = 0.0;
            for (int k = 0; k < 14; ++k) {
                s0 += term0;
                s1 += term1;
                term0 *= -z / (k + 2);
                term1 *= -z / (k + 3);
            }
            w.w0[j] = h * s0;
            w.w1[j] = h * s1;
        } else {
            const double em1 = std::expm1(-z);  // exp(-z) - 1
            w.w0[j] = -em1 / lambda;
            w.w1[j] = (z + em1) / (lambda * z);
        }
    }
    return w;
}

}  // namespace impdelay
