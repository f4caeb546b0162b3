#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace impdelay {

/// Coordinates of a state in the orthonormal eigenbasis of A.
using StateVector = Eigen::VectorXd;

/// A self-adjoint operator A given by its spectrum in an orthonormal
/// eigenbasis. -A generates the diagonal semigroup T(t) = diag(exp(-lambda_j t)).
///
/// The constructor accepts any sorted finite spectrum so that unstable
/// operators can be represented and rejected by the operations that need
/// exponential stability.
class SpectralOperator {
public:
    explicit SpectralOperator(std::vector<double> eigenvalues, double growth_bound = 1.0);

    /// lambda_j = j^2, j = 1..n: the Dirichlet Laplacian on (0, pi).
    static SpectralOperator dirichlet_laplacian(std::size_t n_modes);

    std::size_t dimension() const { return static_cast<std::size_t>(eigenvalues_.size()); }
    const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
    double smallest_eigenvalue() const { return eigenvalues_[0]; }

    /// The constant M in ||T(t)|| <= M exp(nu0 t).
    double growth_bound() const { return growth_bound_; }

    bool exponentially_stable() const { return eigenvalues_[0] > 0.0; }

    /// Throws NotExponentiallyStable unless lambda_1 > 0.
    void require_exponentially_stable() const;

private:
    Eigen::VectorXd eigenvalues_;
    double growth_bound_;
};

/// T(t) v. Requires t >= 0 and matching dimension.
StateVector semigroup_apply(const SpectralOperator& op, double t, const StateVector& v);

/// nu0 = -lambda_1.
double growth_exponent(const SpectralOperator& op);

/// (I - T(omega))^{-1} v, defined when every lambda_j > 0.
StateVector inv_I_minus_T_omega(const SpectralOperator& op, double omega, const StateVector& v);

/// Per-mode weights of one exponential time-differencing step of length h:
///   decay = exp(-lambda h)
///   w0    = int_0^h exp(-lambda (h - s)) ds
///   w1    = int_0^h exp(-lambda (h - s)) s / h ds
/// so that a step with forcing linear in time from f0 to f1 is
///   u1 = decay u0 + w0 f0 + w1 (f1 - f0).
struct EtdWeights {
    Eigen::ArrayXd decay;
    Eigen::ArrayXd w0;
    Eigen::ArrayXd w1;

    static EtdWeights compute(const SpectralOperator& op, double h);
};

}  // namespace impdelay
