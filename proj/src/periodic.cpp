#include "impdelay/periodic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "impdelay/analysis.hpp"
#include "impdelay/errors.hpp"
#include "impdelay/forcing.hpp"
#include "impdelay/mild_solver.hpp"

namespace impdelay {

ForcingSamples ForcingSamples::sample(std::size_t dimension, double step, long nodes_per_period,
                                      const std::function<StateVector(double)>& h) {
    Eigen::MatrixXd values(static_cast<Eigen::Index>(dimension), nodes_per_period + 1);
    for (long j = 0; j <= nodes_per_period; ++j) {
        StateVector v = h(static_cast<double>(j) * step);
        if (static_cast<std::size_t>(v.size()) != dimension) {
            throw InvalidInput("forcing returned wrong dimension");
        }
        values.col(j) = v;
    }
    return ForcingSamples{values, values};
}

StateVector PeriodicSolution::at_node(long node, Side side) const {
    const long n = nodes_per_period();
    long j = node % n;
    if (j < 0) j += n;
    return side == Side::right ? one_period.right_limit(j) : one_period.sample(j);
}

StateVector PeriodicSolution::value_at(double t, Side side) const {
    double s = std::fmod(t, period);
    if (s < 0.0) s += period;
    if (auto node = grid_index(s, grid_step())) return at_node(*node, side);
    return one_period.value_at(s, side);
}

HistorySegment PeriodicSolution::history_at(double t, double delay) const {
    auto node = grid_index(t, grid_step());
    if (!node) throw InvalidInput("periodic history_at: t is not a grid time");
    const SampledSource source(grid_step(), 0, one_period.samples(), one_period.jumps(),
                               one_period.jump_slots(), nullptr, nodes_per_period());
    return cut_window(source, WindowLayout::make(grid_step(), delay), *node);
}

namespace {

struct LinearSetup {
    const SpectralOperator& op;
    double omega;
    TimeGrid grid;
    EtdWeights weights;
    Scheme scheme;
};

LinearSetup make_setup(const SpectralOperator& op, double omega,
                       const std::vector<double>& impulse_times, const IntegratorConfig& cfg) {
    op.require_exponentially_stable();
    TimeGrid grid = TimeGrid::build(omega, impulse_times, cfg.grid_step);
    EtdWeights w = EtdWeights::compute(op, grid.step);
    return LinearSetup{op, omega, std::move(grid), std::move(w), cfg.scheme};
}

/// Propagates u(0) = x0 over one period with piecewise-linear forcing and jumps v_k.
Trajectory propagate(const LinearSetup& s, const ForcingSamples& f,
                     const std::vector<StateVector>& values, const Eigen::VectorXd& x0) {
    const long n_nodes = s.grid.steps_per_period;
    Eigen::MatrixXd samples(x0.size(), n_nodes + 1);
    std::vector<JumpRecord> jumps;
    samples.col(0) = x0;
    Eigen::VectorXd x = x0;
    for (long j = 0; j < n_nodes; ++j) {
        Eigen::ArrayXd y = s.weights.decay * x.array() + s.weights.w0 * f.right.col(j).array();
        if (s.scheme == Scheme::etd2) {
            y += s.weights.w1 * (f.left.col(j + 1) - f.right.col(j)).array();
        }
        samples.col(j + 1) = y.matrix();
        const int k = j + 1 < n_nodes ? s.grid.impulse_at(j + 1) : -1;
        if (k >= 0) {
            Eigen::VectorXd right = y.matrix() + values[static_cast<std::size_t>(k)];
            jumps.push_back({j + 1, static_cast<double>(j + 1) * s.grid.step, y.matrix(), right});
            x = std::move(right);
        } else {
            x = y.matrix();
        }
    }
    return Trajectory(s.grid.step, 0, std::move(samples), std::move(jumps));
}

PeriodicSolution solve_linear(const LinearSetup& s, const ForcingSamples& f,
                              const std::vector<StateVector>& values) {
    const auto n = static_cast<Eigen::Index>(s.op.dimension());
    const long n_nodes = s.grid.steps_per_period;
    if (f.left.rows() != n || f.right.rows() != n || f.left.cols() != n_nodes + 1 ||
        f.right.cols() != n_nodes + 1) {
        throw InvalidInput("forcing samples must be n x (N + 1) for N = " +
                           std::to_string(n_nodes));
    }
    if (values.size() != s.grid.impulse_nodes.size()) {
        throw InvalidInput("one impulse value per impulse time required");
    }
    for (const auto& v : values) {
        if (v.size() != n) throw InvalidInput("impulse value dimension mismatch");
    }
    // Zero start: the value at omega is the quadrature of the forcing plus the
    // propagated jumps, i.e. (I - T(omega)) x0.
    const Trajectory particular = propagate(s, f, values, Eigen::VectorXd::Zero(n));
    const Eigen::VectorXd x0 =
        inv_I_minus_T_omega(s.op, s.omega, particular.sample(n_nodes));
    Trajectory u = propagate(s, f, values, x0);
    if (!u.samples().allFinite()) throw NumericFailure("non-finite periodic solution", 0.0);
    const double residual = (u.sample(n_nodes) - u.sample(0)).norm();
    return PeriodicSolution{std::move(u), s.omega, residual, 0, std::numeric_limits<double>::quiet_NaN(),
                            std::numeric_limits<double>::quiet_NaN(), {}, {}, true};
}

ForcingSamples substitution_forcing(const ProblemSpec& problem, const Trajectory& u,
                                    const WindowLayout& layout, long n_nodes) {
    const SampledSource source(u.grid_step(), 0, u.samples(), u.jumps(), u.jump_slots(), nullptr,
                               n_nodes);
    ForcingSamples f{Eigen::MatrixXd(u.samples().rows(), n_nodes + 1), {}};
    f.right = Eigen::MatrixXd(u.samples().rows(), n_nodes + 1);
    for (long j = 0; j <= n_nodes; ++j) {
        const double t = static_cast<double>(j) * u.grid_step();
        const HistorySegment window = cut_window(source, layout, j);
        f.left.col(j) = detail::evaluate(problem.nonlinearity, t, u.sample(j), window);
        if (const auto* jump = u.jump_at(j)) {
            f.right.col(j) = detail::evaluate(problem.nonlinearity, t, jump->right, window);
        } else {
            f.right.col(j) = f.left.col(j);
        }
    }
    return f;
}

std::vector<StateVector> substitution_impulses(const ProblemSpec& problem, const Trajectory& u,
                                               const TimeGrid& grid) {
    std::vector<StateVector> values;
    values.reserve(grid.impulse_nodes.size());
    for (std::size_t k = 0; k < grid.impulse_nodes.size(); ++k) {
        values.push_back(problem.impulses.apply(k, u.sample(grid.impulse_nodes[k])));
    }
    return values;
}

void check_same_grid(const Trajectory& u, const TimeGrid& grid, std::size_t dim) {
    if (u.first_node() != 0 || static_cast<long>(u.size()) != grid.steps_per_period + 1 ||
        std::abs(u.grid_step() - grid.step) > 1e-15 * grid.step || u.dimension() != dim) {
        throw InvalidInput("periodic iterate does not live on the configured grid");
    }
}

}  // namespace

PeriodicSolution linear_periodic(const SpectralOperator& op, double omega,
                                 const ForcingSamples& forcing,
                                 const std::vector<double>& impulse_times,
                                 const std::vector<StateVector>& impulse_values,
                                 const IntegratorConfig& cfg) {
    const LinearSetup setup = make_setup(op, omega, impulse_times, cfg);
    return solve_linear(setup, forcing, impulse_values);
}

PeriodicSolution linear_periodic(const SpectralOperator& op, double omega,
                                 const std::function<StateVector(double)>& forcing,
                                 const std::vector<double>& impulse_times,
                                 const std::vector<StateVector>& impulse_values,
                                 const IntegratorConfig& cfg) {
    const LinearSetup setup = make_setup(op, omega, impulse_times, cfg);
    const ForcingSamples f =
        ForcingSamples::sample(op.dimension(), setup.grid.step, setup.grid.steps_per_period, forcing);
    return solve_linear(setup, f, impulse_values);
}

Trajectory apply_periodic_operator(const ProblemSpec& problem, const Trajectory& u,
                                   const IntegratorConfig& cfg) {
    const LinearSetup setup =
        make_setup(problem.op, problem.period_omega, problem.impulses.times(), cfg);
    check_same_grid(u, setup.grid, problem.dimension());
    const WindowLayout layout = WindowLayout::make(setup.grid.step, problem.delay_r);
    const long n_nodes = setup.grid.steps_per_period;
    return solve_linear(setup, substitution_forcing(problem, u, layout, n_nodes),
                        substitution_impulses(problem, u, setup.grid))
        .one_period;
}

PeriodicSolution picard_periodic(const ProblemSpec& problem, const PeriodicSolution* guess,
                                 const PicardOptions& options, const IntegratorConfig& cfg) {
    if (!(options.tol > 0.0) || options.max_iter < 1) {
        throw InvalidInput("Picard iteration needs tol > 0 and max_iter >= 1");
    }
    const LinearSetup setup =
        make_setup(problem.op, problem.period_omega, problem.impulses.times(), cfg);
    const WindowLayout layout = WindowLayout::make(setup.grid.step, problem.delay_r);
    const long n_nodes = setup.grid.steps_per_period;
    const auto n = static_cast<Eigen::Index>(problem.dimension());

    Trajectory current = guess != nullptr
                             ? guess->one_period
                             : Trajectory(setup.grid.step, 0,
                                          Eigen::MatrixXd::Zero(n, n_nodes + 1), {});
    check_same_grid(current, setup.grid, problem.dimension());

    const auto declared = declared_report(problem, problem.op.growth_bound());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> differences;
    std::vector<double> ratios;
    for (int m = 1; m <= options.max_iter; ++m) {
        PeriodicSolution next =
            solve_linear(setup, substitution_forcing(problem, current, layout, n_nodes),
                         substitution_impulses(problem, current, setup.grid));
        const double diff = pc_distance(next.one_period, current);
        if (!std::isfinite(diff)) {
            throw NumericFailure("Picard iterate is not finite at iteration " + std::to_string(m),
                                 0.0);
        }
        if (!differences.empty()) {
            ratios.push_back(differences.back() > 0.0 ? diff / differences.back() : 0.0);
        }
        differences.push_back(diff);
        if (diff <= options.tol) {
            next.iterations_used = m;
            next.contraction_estimate = declared ? declared->kappa : nan;
            next.contraction_verified = declared && declared->H3_margin > 0.0;
            next.measured_ratio = ratios.empty() ? nan : ratios.back();
            next.differences = std::move(differences);
            next.ratios = std::move(ratios);
            return next;
        }
        current = std::move(next.one_period);
    }
    throw NonConvergence("Picard iteration did not reach tol = " + std::to_string(options.tol) +
                             " in " + std::to_string(options.max_iter) + " iterations",
                         options.max_iter, ratios.empty() ? nan : ratios.back());
}

std::vector<HistorySegment> poincare_iterate(const ProblemSpec& problem,
                                             const HistorySegment& phi0, int n_periods,
                                             const IntegratorConfig& cfg) {
    if (problem.delay_r > problem.period_omega) {
        throw UnsupportedConfiguration("Poincare map needs r <= omega");
    }
    if (n_periods < 1) throw InvalidInput("n_periods must be >= 1");
    const Trajectory traj =
        integrate_ivp(problem, phi0, problem.period_omega * n_periods, cfg);
    const long n_nodes = TimeGrid::build(problem.period_omega, problem.impulses.times(),
                                         cfg.grid_step)
                             .steps_per_period;
    const SampledSource source(traj);
    const WindowLayout layout = WindowLayout::make(traj.grid_step(), problem.delay_r);
    std::vector<HistorySegment> segments;
    segments.reserve(static_cast<std::size_t>(n_periods));
    for (int k = 1; k <= n_periods; ++k) {
        segments.push_back(cut_window(source, layout, k * n_nodes));
    }
    return segments;
}

}  // namespace impdelay
