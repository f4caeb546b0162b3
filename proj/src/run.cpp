#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "impdelay/analysis.hpp"
#include "impdelay/cli.hpp"
#include "impdelay/io.hpp"
#include "impdelay/mild_solver.hpp"
#include "impdelay/periodic.hpp"

namespace impdelay {

ExitCode exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_input:
        case ErrorKind::not_exponentially_stable:
        case ErrorKind::configuration:
        case ErrorKind::unsupported_configuration: return ExitCode::configuration_error;
        case ErrorKind::numeric_failure: return ExitCode::numeric_failure;
        case ErrorKind::non_convergence: return ExitCode::non_convergence;
        case ErrorKind::internal_consistency: return ExitCode::internal_error;
    }
    return ExitCode::internal_error;
}

const char* to_string(Subcommand s) {
    switch (s) {
        case Subcommand::simulate: return "simulate";
        case Subcommand::periodic: return "periodic";
        case Subcommand::verify: return "verify";
        case Subcommand::stability: return "stability";
        case Subcommand::heat: return "heat";
    }
    return "unknown";
}

Subcommand parse_subcommand(const std::string& text) {
    for (auto s : {Subcommand::simulate, Subcommand::periodic, Subcommand::verify,
                   Subcommand::stability, Subcommand::heat}) {
        if (text == to_string(s)) return s;
    }
    throw ConfigurationError("unknown subcommand '" + text + "'");
}

HeatConfig to_heat_config(const RunConfig& cfg) {
    if (cfg.type != ProblemType::heat) throw ConfigurationError("problem type is not heat");
    HeatConfig h;
    h.n_modes = cfg.modes;
    h.impulse_count = cfg.impulses;
    h.delay_r = cfg.heat_delay;
    h.grid_step = cfg.step;
    h.scheme = cfg.scheme;
    h.forcing = cfg.forcing;
    h.impulse_constant = cfg.impulse_constant;
    h.history = cfg.history.kind;
    h.history_norm = cfg.history.norm;
    h.history_value = cfg.history.value;
    h.seed = cfg.history.seed;
    if (cfg.history.kind == HistoryKind::samples) h.history_samples = read_history_csv(cfg.history.file);
    h.periods = cfg.periods;
    h.tol = cfg.tol;
    h.max_iter = cfg.max_iter;
    h.spot_samples = cfg.samples;
    return h;
}

ProblemSpec build_problem(const RunConfig& cfg) {
    if (cfg.type == ProblemType::heat) return build_heat_problem(to_heat_config(cfg));
    const auto& s = cfg.spectral;
    SpectralOperator op(s.eigenvalues, s.growth_bound);
    const auto n = static_cast<Eigen::Index>(op.dimension());

    Nonlinearity f;
    f.period_omega = s.omega;
    f.declared = DeclaredConstants{s.c0, s.c1, s.c2};
    const double freq = 2.0 * std::numbers::pi / s.omega;
    f.eval = [s, n, freq](double t, const StateVector& x, const HistorySegment& phi) {
        const double wave = std::sin(freq * t);
        StateVector out = (s.state_gain + s.sine_gain * wave) * x;
        if (s.delay_gain != 0.0) out += s.delay_gain * phi.value_at(-phi.delay());
        if (s.forcing_amplitude != 0.0) {
            out += StateVector::Constant(n, s.forcing_amplitude * wave);
        }
        return out;
    };

    std::vector<ImpulseMap> maps;
    for (double v : s.impulse_values) {
        switch (s.impulse_type) {
            case ImpulseKind::linear:
                maps.emplace_back([v](const StateVector& x) { return StateVector(v * x); });
                break;
            case ImpulseKind::sine:
                maps.emplace_back(
                    [v](const StateVector& x) { return StateVector(v * x.array().sin().matrix()); });
                break;
            case ImpulseKind::constant:
                maps.emplace_back([v](const StateVector& x) {
                    return StateVector(StateVector::Constant(x.size(), v));
                });
                break;
        }
    }
    ImpulseSchedule impulses(s.omega, s.impulse_times, std::move(maps), s.impulse_lipschitz);
    return ProblemSpec(std::move(op), std::move(f), std::move(impulses), s.delay, s.omega);
}

IntegratorConfig integrator_config(const RunConfig& cfg) {
    IntegratorConfig ic;
    ic.grid_step = cfg.step;
    ic.scheme = cfg.scheme;
    return ic;
}

HistorySegment initial_history(const RunConfig& cfg) {
    const std::size_t n =
        cfg.type == ProblemType::heat ? static_cast<std::size_t>(cfg.modes) : cfg.spectral.eigenvalues.size();
    const double r = cfg.delay();
    const auto dim = static_cast<Eigen::Index>(n);
    switch (cfg.history.kind) {
        case HistoryKind::zero: return HistorySegment::constant(r, cfg.step, StateVector::Zero(dim));
        case HistoryKind::constant:
            return HistorySegment::constant(r, cfg.step, StateVector::Constant(dim, cfg.history.value));
        case HistoryKind::random: return random_history(r, cfg.step, n, cfg.history.norm, cfg.history.seed);
        case HistoryKind::samples: {
            HistorySegment phi = read_history_csv(cfg.history.file);
            if (phi.dimension() != n) {
                throw ConfigurationError("[history] file: dimension " + std::to_string(phi.dimension()) +
                                         " does not match the problem (" + std::to_string(n) + ")");
            }
            if (std::abs(phi.delay() - r) > 1e-12 * (1.0 + r)) {
                throw ConfigurationError("[history] file: first offset must be -r = " + format_double(-r));
            }
            return phi;
        }
    }
    throw InternalConsistencyError("unknown history kind");
}

namespace {

template <class F>
std::string render(F&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

void header(KeyValueReport& r, const RunConfig& cfg, Subcommand sub) {
    r.add("subcommand", to_string(sub));
    r.add("scheme", to_string(cfg.scheme));
    r.add("step", cfg.step);
}

void finish(const RunConfig& cfg, const KeyValueReport& report, ExitCode code) {
    KeyValueReport copy = report;
    copy.add("exit_code", static_cast<int>(code));
    write_text_file(cfg.out_dir, "report.txt", render([&](std::ostream& os) { copy.write(os); }));
}

PeriodicSolution solve_periodic(const ProblemSpec& problem, const RunConfig& cfg,
                                const IntegratorConfig& ic) {
    return picard_periodic(problem, nullptr, PicardOptions{cfg.tol, cfg.max_iter}, ic);
}

double poincare_gap(const ProblemSpec& problem, const PeriodicSolution& ustar, const RunConfig& cfg,
                    const IntegratorConfig& ic) {
    const HistorySegment target = ustar.history_at(0.0, problem.delay_r);
    const HistorySegment zero = HistorySegment::combine(0.0, target, 0.0, target);
    const auto segments = poincare_iterate(problem, zero, cfg.periods, ic);
    return HistorySegment::combine(1.0, segments.back(), -1.0, target).sup_norm();
}

ExitCode certificate_code(const DecayRecord& d) {
    if (!d.applicable) return ExitCode::certificate_inapplicable;
    return d.bound_holds() ? ExitCode::ok : ExitCode::certificate_failure;
}

ExitCode run_unchecked(const RunConfig& cfg, Subcommand sub) {
    write_text_file(cfg.out_dir, "resolved_config.ini", emit_config(cfg));
    KeyValueReport report;
    header(report, cfg, sub);
    const IntegratorConfig ic = integrator_config(cfg);

    if (sub == Subcommand::heat) {
        const HeatPipelineReport h = run_heat_pipeline(to_heat_config(cfg));
        add_hypotheses(report, h.hypotheses);
        add_periodic(report, *h.periodic);
        report.add("poincare_gap", h.poincare_gap);
        add_decay(report, *h.decay);
        report.add("stability_certificate", to_string(h.stability));
        write_text_file(cfg.out_dir, "periodic.csv",
                        render([&](std::ostream& os) { write_trajectory_csv(os, h.periodic->one_period); }));
        write_text_file(cfg.out_dir, "picard.csv",
                        render([&](std::ostream& os) { write_picard_csv(os, *h.periodic); }));
        write_text_file(cfg.out_dir, "decay.csv",
                        render([&](std::ostream& os) { write_decay_csv(os, *h.decay); }));
        ExitCode code = ExitCode::ok;
        if (h.stability == CertificateStatus::inapplicable) code = ExitCode::certificate_inapplicable;
        if (h.stability == CertificateStatus::failed) code = ExitCode::certificate_failure;
        finish(cfg, report, code);
        return code;
    }

    const ProblemSpec problem = build_problem(cfg);
    switch (sub) {
        case Subcommand::simulate: {
            const Trajectory traj = integrate_ivp(problem, initial_history(cfg), cfg.t_end, ic);
            report.add("t_end", traj.end_time());
            report.add("nodes", traj.size());
            report.add("jumps", traj.jumps().size());
            report.add("final_norm", traj.sample(traj.last_node()).norm());
            report.add("pc_norm", traj.pc_norm());
            write_text_file(cfg.out_dir, "trajectory.csv",
                            render([&](std::ostream& os) { write_trajectory_csv(os, traj); }));
            finish(cfg, report, ExitCode::ok);
            return ExitCode::ok;
        }
        case Subcommand::periodic: {
            const PeriodicSolution ustar = solve_periodic(problem, cfg, ic);
            add_periodic(report, ustar);
            if (problem.delay_r <= problem.period_omega) {
                report.add("poincare_periods", cfg.periods);
                report.add("poincare_gap", poincare_gap(problem, ustar, cfg, ic));
            }
            write_text_file(cfg.out_dir, "periodic.csv",
                            render([&](std::ostream& os) { write_trajectory_csv(os, ustar.one_period); }));
            write_text_file(cfg.out_dir, "picard.csv",
                            render([&](std::ostream& os) { write_picard_csv(os, ustar); }));
            finish(cfg, report, ExitCode::ok);
            return ExitCode::ok;
        }
        case Subcommand::verify: {
            SpotCheckOptions spot;
            spot.samples = cfg.samples;
            spot.seed = cfg.history.seed;
            const HypothesisReport h = build_report(problem, problem.op.growth_bound(), spot);
            add_hypotheses(report, h);
            const ExitCode code = h.h3_holds() ? ExitCode::ok : ExitCode::certificate_failure;
            finish(cfg, report, code);
            return code;
        }
        case Subcommand::stability: {
            const PeriodicSolution ustar = solve_periodic(problem, cfg, ic);
            add_periodic(report, ustar);
            const DecayRecord d = decay_experiment(problem, ustar, initial_history(cfg), cfg.periods, ic);
            if (auto h = declared_report(problem, problem.op.growth_bound())) add_hypotheses(report, *h);
            add_decay(report, d);
            write_text_file(cfg.out_dir, "decay.csv",
                            render([&](std::ostream& os) { write_decay_csv(os, d); }));
            const ExitCode code = certificate_code(d);
            finish(cfg, report, code);
            return code;
        }
        case Subcommand::heat: break;
    }
    throw InternalConsistencyError("unhandled subcommand");
}

}  // namespace

ExitCode run(const RunConfig& cfg, Subcommand sub, std::ostream& diag) {
    try {
        if (sub == Subcommand::heat && cfg.type != ProblemType::heat) {
            throw ConfigurationError("the heat subcommand needs [problem] type = heat");
        }
        return run_unchecked(cfg, sub);
    } catch (const Error& e) {
        diag << "impdelay " << to_string(sub) << ": " << to_string(e.kind()) << " error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        diag << "impdelay " << to_string(sub) << ": internal error: " << e.what() << '\n';
        return ExitCode::internal_error;
    }
}

}  // namespace impdelay
