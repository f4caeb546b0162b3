#include "impdelay/problem.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "impdelay/errors.hpp"
#include "impdelay/forcing.hpp"

namespace impdelay {

ImpulseSchedule::ImpulseSchedule(double omega) : omega_(omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidInput("period omega must be > 0");
}

ImpulseSchedule::ImpulseSchedule(double omega, std::vector<double> times,
                                 std::vector<ImpulseMap> maps,
                                 std::optional<std::vector<double>> lipschitz)
    : omega_(omega),
      times_(std::move(times)),
      maps_(std::move(maps)),
      lipschitz_(std::move(lipschitz)) {
    if (!(omega > 0.0) || !std::isfinite(omega)) throw InvalidInput("period omega must be > 0");
    if (times_.size() != maps_.size()) {
        throw InvalidInput("impulse schedule: one map per impulse time required");
    }
    for (std::size_t k = 0; k < times_.size(); ++k) {
        if (!(times_[k] > 0.0) || !(times_[k] < omega_)) {
            throw InvalidInput("impulse times must lie strictly inside (0, omega)");
        }
        if (k > 0 && !(times_[k] > times_[k - 1])) {
            throw InvalidInput("impulse times must be strictly increasing");
        }
        if (!maps_[k]) throw InvalidInput("impulse map is empty");
    }
    if (lipschitz_) {
        if (lipschitz_->size() != times_.size()) {
            throw InvalidInput("impulse schedule: one Lipschitz constant per impulse required");
        }
        for (double a : *lipschitz_) {
            if (!(a >= 0.0)) throw InvalidInput("impulse Lipschitz constants must be >= 0");
        }
    }
}

double ImpulseSchedule::time(long k) const {
    const auto p = static_cast<long>(times_.size());
    if (p == 0) throw InvalidInput("impulse schedule is empty");
    long period = k >= 0 ? k / p : -((-k + p - 1) / p);
    long idx = k - period * p;
    return times_[static_cast<std::size_t>(idx)] + static_cast<double>(period) * omega_;
}

StateVector ImpulseSchedule::apply(std::size_t k, const StateVector& x) const {
    StateVector jump = map(k)(x);
    if (jump.size() != x.size()) throw InvalidInput("impulse map returned wrong dimension");
    return jump;
}

ProblemSpec::ProblemSpec(SpectralOperator op_, Nonlinearity f, ImpulseSchedule impulses_,
                         double delay, double omega)
    : op(std::move(op_)),
      nonlinearity(std::move(f)),
      impulses(std::move(impulses_)),
      delay_r(delay),
      period_omega(omega) {
    if (!(delay_r > 0.0) || !std::isfinite(delay_r)) throw InvalidInput("delay r must be > 0");
    if (!(period_omega > 0.0) || !std::isfinite(period_omega)) {
        throw InvalidInput("period omega must be > 0");
    }
    if (!nonlinearity.eval) throw InvalidInput("nonlinearity has no evaluator");
    auto same = [&](double w) { return std::abs(w - period_omega) <= 1e-12 * period_omega; };
    if (!same(nonlinearity.period_omega) || !same(impulses.period())) {
        throw InvalidInput("nonlinearity, impulses and problem must share one period omega");
    }
}

const char* to_string(Scheme scheme) { return scheme == Scheme::etd1 ? "etd1" : "etd2"; }

Scheme parse_scheme(const std::string& text) {
    if (text == "etd1" || text == "ETD1") return Scheme::etd1;
    if (text == "etd2" || text == "ETD2") return Scheme::etd2;
    throw ConfigurationError("unknown scheme '" + text + "' (expected etd1 or etd2)");
}

std::optional<long> grid_index(double t, double h) {
    const double q = t / h;
    const double n = std::round(q);
    if (std::abs(q - n) <= 1e-9 * std::max(1.0, std::abs(q))) return static_cast<long>(n);
    return std::nullopt;
}

namespace {

std::string fmt17(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

TimeGrid TimeGrid::build(double omega, const std::vector<double>& impulse_times, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigurationError("grid step must be > 0");
    auto n = grid_index(omega, h);
    if (!n || *n < 1) {
        throw ConfigurationError("grid step h = " + fmt17(h) + " does not divide period omega = " +
                                 fmt17(omega));
    }
    TimeGrid grid{omega / static_cast<double>(*n), *n, {}, {}};
    grid.impulse_slot.assign(static_cast<std::size_t>(*n), -1);
    double prev = 0.0;
    for (std::size_t k = 0; k < impulse_times.size(); ++k) {
        auto node = grid_index(impulse_times[k], grid.step);
        if (!node || *node <= 0 || *node >= *n) {
            throw ConfigurationError("grid step h = " + fmt17(grid.step) +
                                     " does not divide impulse gap " +
                                     fmt17(impulse_times[k] - prev) + " before t = " +
                                     fmt17(impulse_times[k]));
        }
        grid.impulse_nodes.push_back(*node);
        grid.impulse_slot[static_cast<std::size_t>(*node)] = static_cast<int>(k);
        prev = impulse_times[k];
    }
    return grid;
}

TimeGrid TimeGrid::nearest(double omega, const std::vector<double>& impulse_times, double h) {
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigurationError("grid step must be > 0");
    const auto start = static_cast<long>(std::ceil(omega / h - 1e-9));
    const long stop = 4 * start + 4096;
    for (long n = std::max(1L, start); n <= stop; ++n) {
        try {
            return build(omega, impulse_times, omega / static_cast<double>(n));
        } catch (const ConfigurationError&) {
        }
    }
    throw ConfigurationError("no grid step near h = " + fmt17(h) +
                             " is commensurate with the period and impulse times");
}

int TimeGrid::impulse_at(long node) const {
    long j = node % steps_per_period;
    if (j < 0) j += steps_per_period;
    return impulse_slot[static_cast<std::size_t>(j)];
}

namespace detail {

Eigen::VectorXd evaluate(const Nonlinearity& f, double t, const StateVector& x,
                         const HistorySegment& phi) {
    Eigen::VectorXd value = f.eval(t, x, phi);
    if (value.size() != x.size()) {
        throw InvalidInput("nonlinearity returned dimension " + std::to_string(value.size()) +
                           ", expected " + std::to_string(x.size()));
    }
    if (!value.allFinite()) {
        throw NumericFailure("nonlinearity is not finite at t = " + fmt17(t), t);
    }
    return value;
}

}  // namespace detail

}  // namespace impdelay
