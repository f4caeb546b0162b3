#include "impdelay/mild_solver.hpp"

#include <cmath>
#include <string>

#include "impdelay/errors.hpp"
#include "impdelay/forcing.hpp"

namespace impdelay {

Trajectory integrate_ivp(const ProblemSpec& problem, const HistorySegment& phi, double t_end,
                         const IntegratorConfig& cfg) {
    if (phi.dimension() != problem.dimension()) {
        throw InvalidInput("initial history dimension does not match the operator");
    }
    if (std::abs(phi.delay() - problem.delay_r) > 1e-9 * problem.delay_r) {
        throw InvalidInput("initial history must be defined on [-r, 0]");
    }
    const TimeGrid grid =
        TimeGrid::build(problem.period_omega, problem.impulses.times(), cfg.grid_step);
    const double h = grid.step;
    const auto steps = grid_index(t_end, h);
    if (!(t_end > 0.0) || !steps || *steps <= 0) {
        throw ConfigurationError("t_end must be a positive grid node");
    }

    const EtdWeights w = EtdWeights::compute(problem.op, h);
    const WindowLayout layout = WindowLayout::make(h, problem.delay_r);
    const auto n = static_cast<Eigen::Index>(problem.dimension());

    Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(n, *steps + 1);
    std::vector<JumpRecord> jumps;
    std::vector<int> slot(static_cast<std::size_t>(*steps + 1), -1);
    samples.col(0) = phi.newest();
    const SampledSource source(h, 0, samples, jumps, slot, &phi);

    Eigen::VectorXd x = samples.col(0);  // right limit at the current node
    Eigen::VectorXd y(n);
    for (long i = 0; i < *steps; ++i) {
        const double t = static_cast<double>(i) * h;
        const Eigen::VectorXd f0 =
            detail::evaluate(problem.nonlinearity, t, x, cut_window(source, layout, i));
        const Eigen::ArrayXd base = w.decay * x.array() + w.w0 * f0.array();
        y = base.matrix();
        if (cfg.scheme == Scheme::etd2) {
            for (int sweep = 0; sweep < cfg.max_corrector_sweeps; ++sweep) {
                samples.col(i + 1) = y;
                const Eigen::VectorXd f1 = detail::evaluate(problem.nonlinearity, t + h, y,
                                                            cut_window(source, layout, i + 1));
                Eigen::VectorXd next = (base + w.w1 * (f1 - f0).array()).matrix();
                const double delta = (next - y).norm();
                y = std::move(next);
                if (delta <= cfg.corrector_tolerance * (1.0 + y.norm())) break;
            }
        }
        if (!y.allFinite()) {
            throw NumericFailure("non-finite state at t = " + std::to_string(t + h), t + h);
        }
        samples.col(i + 1) = y;
        const int k = grid.impulse_at(i + 1);
        if (k >= 0) {
            Eigen::VectorXd right = y + problem.impulses.apply(static_cast<std::size_t>(k), y);
            if (!right.allFinite()) {
                throw NumericFailure("non-finite impulse at t = " + std::to_string(t + h), t + h);
            }
            slot[static_cast<std::size_t>(i + 1)] = static_cast<int>(jumps.size());
            jumps.push_back({i + 1, t + h, y, right});
            x = right;
        } else {
            x = y;
        }
    }
    return Trajectory(h, 0, std::move(samples), std::move(jumps), phi);
}

}  // namespace impdelay
