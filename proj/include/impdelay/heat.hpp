#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "impdelay/analysis.hpp"
#include "impdelay/history.hpp"
#include "impdelay/periodic.hpp"
#include "impdelay/problem.hpp"

namespace impdelay {

/// Declared a_k for the impulse I_k(u) = (pi/p)(e^{sin u} - 1).
enum class ImpulseConstant {
    nominal,      ///< a_k = pi/p
    conservative  ///< a_k = e pi/p, a global bound for the slope of e^{sin u}
};

enum class HistoryKind { zero, constant, random, samples };

/// The Dirichlet heat problem on (0, pi) with omega = 2 pi:
///
///   u_t = u_xx + (1/4) sin t u + int_{-r}^0 e^{4s} u(t+s) ds [+ sin x sin t]
///   Delta u(t_k) = (pi/p)(e^{sin u(t_k)} - 1),  t_k = (2k-1) pi / p
///
/// truncated to the first n sine modes.
struct HeatConfig {
    int n_modes = 16;
    int impulse_count = 2;
    double delay_r = 0.1;
    /// Requested step; 0 selects the default 1e-3. The nearest commensurate step is used.
    double grid_step = 0.0;
    Scheme scheme = Scheme::etd2;
    bool forcing = false;
    ImpulseConstant impulse_constant = ImpulseConstant::nominal;

    HistoryKind history = HistoryKind::random;
    double history_norm = 1.0;   // random: ||phi||_Pr
    double history_value = 0.0;  // constant: every coefficient
    std::uint64_t seed = 0;
    std::optional<HistorySegment> history_samples;

    int periods = 10;
    double tol = 1e-8;
    int max_iter = 200;
    std::size_t spot_samples = 1000;
};

/// Coefficients -> values at the collocation points x_m = m pi/(n+1), m = 1..n.
Eigen::VectorXd heat_to_physical(const Eigen::VectorXd& coefficients);
/// Inverse of heat_to_physical.
Eigen::VectorXd heat_to_spectral(const Eigen::VectorXd& values);

ProblemSpec build_heat_problem(const HeatConfig& cfg);

/// Grid and scheme for a heat configuration.
IntegratorConfig heat_integrator(const HeatConfig& cfg);

/// The initial history requested by cfg on the integrator grid.
HistorySegment heat_initial_history(const HeatConfig& cfg, double step);

enum class CertificateStatus { passed, failed, inapplicable };
const char* to_string(CertificateStatus status);

struct HeatPipelineReport {
    HypothesisReport hypotheses;
    std::optional<PeriodicSolution> periodic;
    /// Sup distance between u*_0 and the Poincare iterate after cfg.periods periods.
    double poincare_gap = 0.0;
    std::optional<DecayRecord> decay;
    CertificateStatus stability = CertificateStatus::inapplicable;
    std::string stage;  // last stage reached: verify, periodic, poincare, stability
};

/// verify -> picard_periodic -> poincare cross-check -> decay_experiment.
/// Picard runs even without a positive (H3) margin and then reports an unverified
/// contraction; the decay certificate is inapplicable without a positive (H3') margin.
/// Library errors are rethrown with the stage prepended.
HeatPipelineReport run_heat_pipeline(const HeatConfig& cfg);

}  // namespace impdelay
