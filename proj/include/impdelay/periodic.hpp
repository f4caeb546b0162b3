#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "impdelay/history.hpp"
#include "impdelay/problem.hpp"
#include "impdelay/trajectory.hpp"

namespace impdelay {

/// A forcing h sampled on the nodes 0..N of one period. `left` holds h(t_j^-),
/// `right` holds h(t_j^+); they differ only where h jumps. The step
/// [t_j, t_{j+1}] sees h linear from right(j) to left(j+1).
struct ForcingSamples {
    Eigen::MatrixXd left;
    Eigen::MatrixXd right;

    /// Samples of a continuous forcing.
    static ForcingSamples sample(std::size_t dimension, double step, long nodes_per_period,
                                 const std::function<StateVector(double)>& h);
};

/// An omega-periodic mild solution on one period, extended by u(t) = u(t mod omega).
struct PeriodicSolution {
    Trajectory one_period;  ///< nodes 0..N
    double period;
    /// ||u(omega) - u(0)||.
    double residual = 0.0;
    int iterations_used = 0;
    /// Theoretical contraction factor kappa; NaN when constants are not declared.
    double contraction_estimate = 0.0;
    /// Last measured ratio of successive Picard differences; NaN with fewer than two.
    double measured_ratio = 0.0;
    std::vector<double> differences;
    std::vector<double> ratios;
    /// False when the (H3) margin is not positive or cannot be computed.
    bool contraction_verified = true;

    long nodes_per_period() const { return static_cast<long>(one_period.size()) - 1; }
    double grid_step() const { return one_period.grid_step(); }

    /// Value at any grid node through periodic extension.
    StateVector at_node(long node, Side side = Side::left) const;
    StateVector value_at(double t, Side side = Side::left) const;

    /// u*_t for a grid time t, wrapping periodically.
    HistorySegment history_at(double t, double delay) const;
};

/// The unique periodic solution of u' + A u = h, Delta u(t_i) = v_i: the initial
/// value x0 = (I - T(omega))^{-1}(int_0^omega T(omega - s) h(s) ds + sum T(omega - t_i) v_i)
/// is computed with the same exponential quadrature that then propagates it.
PeriodicSolution linear_periodic(const SpectralOperator& op, double omega,
                                 const ForcingSamples& forcing,
                                 const std::vector<double>& impulse_times,
                                 const std::vector<StateVector>& impulse_values,
                                 const IntegratorConfig& cfg);

PeriodicSolution linear_periodic(const SpectralOperator& op, double omega,
                                 const std::function<StateVector(double)>& forcing,
                                 const std::vector<double>& impulse_times,
                                 const std::vector<StateVector>& impulse_values,
                                 const IntegratorConfig& cfg);

/// One application of the substitution operator: P[F(., u, u_.), I(u(t_k))].
Trajectory apply_periodic_operator(const ProblemSpec& problem, const Trajectory& u,
                                   const IntegratorConfig& cfg);

struct PicardOptions {
    double tol = 1e-8;
    int max_iter = 200;
};

/// Picard iteration u^{m+1} = Q u^m from `guess` (zero when null), stopping once
/// the discrete PC distance of successive iterates is at most tol.
PeriodicSolution picard_periodic(const ProblemSpec& problem, const PeriodicSolution* guess,
                                 const PicardOptions& options, const IntegratorConfig& cfg);

/// u_{k omega} for k = 1..n_periods from one long integration starting at phi0.
/// Requires r <= omega.
std::vector<HistorySegment> poincare_iterate(const ProblemSpec& problem,
                                             const HistorySegment& phi0, int n_periods,
                                             const IntegratorConfig& cfg);

}  // namespace impdelay
