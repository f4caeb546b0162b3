#include "impdelay/heat.hpp"

#include <cmath>
#include <numbers>

#include "impdelay/errors.hpp"

namespace impdelay {

namespace {

constexpr double kPi = std::numbers::pi;

void validate(const HeatConfig& cfg) {
    if (cfg.n_modes < 1) throw ConfigurationError("heat: modes must be >= 1");
    if (cfg.impulse_count < 1) throw ConfigurationError("heat: impulses must be >= 1");
    if (!(cfg.delay_r > 0.0) || !std::isfinite(cfg.delay_r)) {
        throw ConfigurationError("heat: delay must be > 0");
    }
    if (cfg.grid_step < 0.0 || !std::isfinite(cfg.grid_step)) {
        throw ConfigurationError("heat: step must be >= 0");
    }
    if (cfg.periods < 1) throw ConfigurationError("heat: periods must be >= 1");
    if (!(cfg.tol > 0.0) || cfg.max_iter < 1) {
        throw ConfigurationError("heat: need tol > 0 and max_iter >= 1");
    }
    if (cfg.history == HistoryKind::samples && !cfg.history_samples) {
        throw ConfigurationError("heat: history kind 'samples' without samples");
    }
}

std::vector<double> impulse_times(int p) {
    std::vector<double> t;
    for (int k = 1; k <= p; ++k) t.push_back((2.0 * k - 1.0) * kPi / p);
    return t;
}

// S(m, j) = sqrt(2/pi) sin(j x_m), x_m = m pi/(n+1).
Eigen::MatrixXd sine_matrix(Eigen::Index n) {
    Eigen::MatrixXd s(n, n);
    const double scale = std::sqrt(2.0 / kPi);
    for (Eigen::Index m = 1; m <= n; ++m) {
        for (Eigen::Index j = 1; j <= n; ++j) {
            s(m - 1, j - 1) = scale * std::sin(static_cast<double>(j * m) * kPi /
                                               static_cast<double>(n + 1));
        }
    }
    return s;
}

}  // namespace

Eigen::VectorXd heat_to_physical(const Eigen::VectorXd& coefficients) {
    return sine_matrix(coefficients.size()) * coefficients;
}

Eigen::VectorXd heat_to_spectral(const Eigen::VectorXd& values) {
    const auto n = values.size();
    return (kPi / static_cast<double>(n + 1)) * (sine_matrix(n).transpose() * values);
}

ProblemSpec build_heat_problem(const HeatConfig& cfg) {
    validate(cfg);
    const double omega = 2.0 * kPi;
    const double r = cfg.delay_r;
    const auto n = static_cast<Eigen::Index>(cfg.n_modes);
    SpectralOperator op = SpectralOperator::dirichlet_laplacian(static_cast<std::size_t>(n));
    const double lambda1 = op.smallest_eigenvalue();

    // sin x = sqrt(pi/2) e_1(x) with e_1 = sqrt(2/pi) sin x.
    const double amplitude = cfg.forcing ? std::sqrt(kPi / 2.0) : 0.0;
    Nonlinearity f;
    f.period_omega = omega;
    f.eval = [lambda1, amplitude](double t, const StateVector& x, const HistorySegment& phi) {
        StateVector out = (lambda1 / 4.0) * std::sin(t) * x;
        out += phi.integrate([lambda1](double s) { return std::exp(4.0 * s / lambda1); });
        if (amplitude != 0.0) out[0] += amplitude * std::sin(t);
        return out;
    };
    f.declared.c0 = amplitude;
    f.declared.c1 = lambda1 / 4.0;
    f.declared.c2 = (lambda1 / 4.0) * (1.0 - std::exp(-4.0 * r / lambda1));

    const int p = cfg.impulse_count;
    const double gain = lambda1 * kPi / p;
    const Eigen::MatrixXd forward = sine_matrix(n);
    const Eigen::MatrixXd backward = (kPi / static_cast<double>(n + 1)) * forward.transpose();
    ImpulseMap jump = [gain, forward, backward](const StateVector& u) {
        const Eigen::VectorXd values = forward * u;
        const Eigen::VectorXd jumped =
            (gain * (values.array().sin().exp() - 1.0)).matrix();
        return StateVector(backward * jumped);
    };
    const double a = cfg.impulse_constant == ImpulseConstant::nominal ? gain
                                                                    : std::numbers::e * gain;
    ImpulseSchedule impulses(omega, impulse_times(p), std::vector<ImpulseMap>(p, jump),
                             std::vector<double>(p, a));
    return ProblemSpec(std::move(op), std::move(f), std::move(impulses), r, omega);
}

IntegratorConfig heat_integrator(const HeatConfig& cfg) {
    validate(cfg);
    const double requested = cfg.grid_step > 0.0 ? cfg.grid_step : 1e-3;
    IntegratorConfig ic;
    ic.grid_step = cfg.grid_step > 0.0
                       ? TimeGrid::build(2.0 * kPi, impulse_times(cfg.impulse_count), requested).step
                       : TimeGrid::nearest(2.0 * kPi, impulse_times(cfg.impulse_count), requested).step;
    ic.scheme = cfg.scheme;
    return ic;
}

HistorySegment heat_initial_history(const HeatConfig& cfg, double step) {
    const auto n = static_cast<std::size_t>(cfg.n_modes);
    switch (cfg.history) {
        case HistoryKind::zero:
            return HistorySegment::constant(cfg.delay_r, step,
                                            StateVector::Zero(static_cast<Eigen::Index>(n)));
        case HistoryKind::constant:
            return HistorySegment::constant(
                cfg.delay_r, step,
                StateVector::Constant(static_cast<Eigen::Index>(n), cfg.history_value));
        case HistoryKind::random:
            return random_history(cfg.delay_r, step, n, cfg.history_norm, cfg.seed);
        case HistoryKind::samples:
            if (cfg.history_samples->dimension() != n ||
                std::abs(cfg.history_samples->delay() - cfg.delay_r) > 1e-12 * (1.0 + cfg.delay_r)) {
                throw ConfigurationError("heat: history samples do not match modes and delay");
            }
            return *cfg.history_samples;
    }
    throw InternalConsistencyError("heat: unknown history kind");
}

const char* to_string(CertificateStatus status) {
    switch (status) {
        case CertificateStatus::passed: return "passed";
        case CertificateStatus::failed: return "failed";
        case CertificateStatus::inapplicable: return "inapplicable";
    }
    return "unknown";
}

HeatPipelineReport run_heat_pipeline(const HeatConfig& cfg) {
    HeatPipelineReport out;
    out.stage = "verify";
    try {
        const ProblemSpec problem = build_heat_problem(cfg);
        const IntegratorConfig ic = heat_integrator(cfg);
        SpotCheckOptions spot;
        spot.samples = cfg.spot_samples;
        spot.seed = cfg.seed;
        out.hypotheses = build_report(problem, problem.op.growth_bound(), spot);

        out.stage = "periodic";
        out.periodic = picard_periodic(problem, nullptr, PicardOptions{cfg.tol, cfg.max_iter}, ic);

        out.stage = "poincare";
        const HistorySegment start = out.periodic->history_at(0.0, problem.delay_r);
        const HistorySegment zero = HistorySegment::combine(0.0, start, 0.0, start);
        const auto segments = poincare_iterate(problem, zero, cfg.periods, ic);
        out.poincare_gap = HistorySegment::combine(1.0, segments.back(), -1.0, start).sup_norm();

        out.stage = "stability";
        out.decay = decay_experiment(problem, *out.periodic,
                                     heat_initial_history(cfg, ic.grid_step), cfg.periods, ic);
        if (!out.decay->applicable) {
            out.stability = CertificateStatus::inapplicable;
        } else {
            out.stability = out.decay->bound_holds() ? CertificateStatus::passed
                                                     : CertificateStatus::failed;
        }
    } catch (const Error& e) {
        rethrow_with_context(e, "heat pipeline stage '" + out.stage + "'");
    }
    return out;
}

}  // namespace impdelay
