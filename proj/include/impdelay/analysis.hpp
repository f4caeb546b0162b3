#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "impdelay/history.hpp"
#include "impdelay/periodic.hpp"
#include "impdelay/problem.hpp"

namespace impdelay {

/// Declared constants of a problem and every margin derived from them.
///
///   H3_margin      = |nu0|/M - [(c1 + c2) + sum(a)/omega]
///   H3prime_margin = |nu0|/M - [(c1 + c2 exp(-nu0 r)) + sum(a)/omega]
///   kappa          = (M/|nu0|)(c1 + c2) + M sum(a)/(|nu0| omega)
///   sigma          = -nu0 - sum(ln(1 + M a_k))/omega - M(c1 + c2 exp(-nu0 r))
///
/// kappa_sup bounds the Lipschitz constant of the periodic substitution operator in
/// the sup norm: (M/|nu0|)(c1 + c2) + M max_j sum_k a_k e^{nu0 (t_j - t_k mod omega)}
/// / (1 - e^{nu0 omega}). Without impulse times every impulse is taken at lag 0.
///
/// The spot check samples pairs of states and histories; any violated
/// inequality clears `constants_verified` but leaves the arithmetic untouched.
struct HypothesisReport {
    double M = 1.0;
    double nu0 = 0.0;
    double omega = 0.0;
    double delay_r = 0.0;
    std::optional<double> c0;
    double c1 = 0.0;
    double c2 = 0.0;
    std::vector<double> a;
    double H3_margin = 0.0;
    double H3prime_margin = 0.0;
    double kappa = 0.0;
    double kappa_sup = 0.0;
    double sigma = 0.0;

    bool constants_verified = true;
    std::size_t samples_checked = 0;
    std::size_t violation_count = 0;
    std::vector<std::string> violations;  // first few, human readable

    bool h3_holds() const { return H3_margin > 0.0; }
    bool h3prime_holds() const { return H3prime_margin > 0.0; }
};

/// Pure arithmetic on declared constants.
HypothesisReport report_from_constants(double M, double nu0, double omega, double delay_r,
                                       std::optional<double> c0, double c1, double c2,
                                       std::vector<double> a,
                                       const std::vector<double>& impulse_times = {});

/// Arithmetic-only report, or nullopt when c1, c2 or the a_k are not declared.
std::optional<HypothesisReport> declared_report(const ProblemSpec& problem, double M);

struct SpotCheckOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    /// Sampled coordinates are uniform in [-radius, radius].
    double radius = 1.0;
};

/// Fills the report from the declared constants and spot-checks (H1), (H1'), (H2).
/// Throws InvalidInput when c1, c2 or the a_k are missing.
HypothesisReport build_report(const ProblemSpec& problem, double M,
                              const SpotCheckOptions& options = {});

/// phi_norm * prod_{0 < t_k < t}(1 + beta_k) * exp((alpha1 + alpha2) t).
double gronwall_bound(double phi_norm, double alpha1, double alpha2,
                      const std::vector<std::pair<double, double>>& beta, double t);

struct DecayRecord {
    bool applicable = false;
    double sigma = 0.0;
    double c_phi = 0.0;
    double allowance = 0.0;
    std::vector<double> times;
    std::vector<double> errors;           // ||u(t) - u*(t)|| at grid nodes
    std::vector<double> envelope;         // C(phi) exp(-sigma t)
    std::vector<double> product_envelope; // C(phi) prod(1 + M a_k) exp((nu0 + M(c1 + c2 e^{-nu0 r})) t)
    std::size_t violations = 0;           // nodes where errors > envelope + allowance
    std::size_t product_violations = 0;
    double worst_ratio = 0.0;             // max errors / envelope
    double fitted_rate = 0.0;

    bool bound_holds() const { return applicable && violations == 0; }
};

/// Integrates from phi and compares against the periodic orbit u*.
DecayRecord decay_experiment(const ProblemSpec& problem, const PeriodicSolution& ustar,
                             const HistorySegment& phi, int n_periods,
                             const IntegratorConfig& cfg);

/// Least-squares slope of log(e) against t over the last half of the samples, negated.
double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& errors);

}  // namespace impdelay
