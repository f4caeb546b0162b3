#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "impdelay/errors.hpp"
#include "impdelay/heat.hpp"
#include "impdelay/problem.hpp"

namespace impdelay {

/// Process exit status of every subcommand.
enum class ExitCode : int {
    ok = 0,
    internal_error = 1,
    configuration_error = 2,  // also invalid input and unsupported configurations
    non_convergence = 3,
    certificate_failure = 4,
    certificate_inapplicable = 5,
    numeric_failure = 6,
};

ExitCode exit_code_for(ErrorKind kind);

enum class Subcommand { simulate, periodic, verify, stability, heat };
const char* to_string(Subcommand s);
Subcommand parse_subcommand(const std::string& text);

enum class ProblemType { spectral, heat };
enum class ImpulseKind { linear, sine, constant };

/// u' + diag(lambda) u = F(t, u, u_t) with
///   F = state_gain u + sine_gain sin(2 pi t/omega) u + delay_gain u(t - r)
///       + forcing_amplitude sin(2 pi t/omega) 1
/// and impulses I_k(u) = v_k u (linear), v_k sin(u) (sine) or v_k 1 (constant).
struct SpectralProblemConfig {
    std::vector<double> eigenvalues{1.0};
    double omega = 6.283185307179586;
    double delay = 0.1;
    double growth_bound = 1.0;
    double state_gain = 0.0;
    double delay_gain = 0.0;
    double sine_gain = 0.0;
    double forcing_amplitude = 0.0;
    std::vector<double> impulse_times;
    ImpulseKind impulse_type = ImpulseKind::linear;
    std::vector<double> impulse_values;
    /// Declared constants; parse_config fills the ones left out from the gains.
    std::optional<double> c0;
    std::optional<double> c1;
    std::optional<double> c2;
    std::optional<std::vector<double>> impulse_lipschitz;
};

struct HistoryConfig {
    HistoryKind kind = HistoryKind::zero;
    double value = 0.0;
    double norm = 1.0;
    std::uint64_t seed = 0;
    std::string file;
};

struct RunConfig {
    ProblemType type = ProblemType::spectral;
    SpectralProblemConfig spectral;
    // heat problem
    int modes = 16;
    int impulses = 2;
    bool forcing = false;
    ImpulseConstant impulse_constant = ImpulseConstant::nominal;
    double heat_delay = 0.1;

    // integrator
    double step = 0.0;  // resolved by parse_config
    Scheme scheme = Scheme::etd2;
    // solver
    double tol = 1e-8;
    int max_iter = 200;
    int periods = 10;
    double t_end = 0.0;  // resolved: periods * omega unless given
    std::size_t samples = 1000;

    HistoryConfig history;
    std::string out_dir = "impdelay-out";

    double omega() const;
    double delay() const;
};

/// INI text: sections [problem] [integrator] [solver] [history] [output],
/// "key = value" lines, lists comma separated, ';' or '#' comments.
RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

/// Fills defaults, checks ranges and grid commensurability. Called by the parsers;
/// call again after overriding fields.
void resolve_config(RunConfig& cfg);

/// Every resolved field, 17 significant digits; parsing the output gives the same config.
std::string emit_config(const RunConfig& cfg);

ProblemSpec build_problem(const RunConfig& cfg);
HeatConfig to_heat_config(const RunConfig& cfg);
IntegratorConfig integrator_config(const RunConfig& cfg);
HistorySegment initial_history(const RunConfig& cfg);

/// Runs a subcommand, writes its artifacts into cfg.out_dir and returns the exit
/// status. Library errors are reported on `diag` and mapped through exit_code_for.
ExitCode run(const RunConfig& cfg, Subcommand sub, std::ostream& diag);

}  // namespace impdelay
