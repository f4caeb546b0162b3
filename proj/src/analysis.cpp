#include "impdelay/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "impdelay/errors.hpp"
#include "impdelay/mild_solver.hpp"

namespace impdelay {

HypothesisReport report_from_constants(double M, double nu0, double omega, double delay_r,
                                       std::optional<double> c0, double c1, double c2,
                                       std::vector<double> a,
                                       const std::vector<double>& impulse_times) {
    if (!(M >= 1.0)) throw InvalidInput("M must be >= 1");
    if (!(nu0 < 0.0)) throw NotExponentiallyStable("growth exponent nu0 must be negative");
    if (!(omega > 0.0) || !(delay_r >= 0.0)) throw InvalidInput("need omega > 0 and r >= 0");
    if (!impulse_times.empty() && impulse_times.size() != a.size()) {
        throw InvalidInput("one impulse time per Lipschitz constant required");
    }
    if (!(c1 >= 0.0) || !(c2 >= 0.0) || (c0 && !(*c0 >= 0.0))) {
        throw InvalidInput("declared constants must be >= 0");
    }
    for (double ak : a) {
        if (!(ak >= 0.0)) throw InvalidInput("impulse Lipschitz constants must be >= 0");
    }
    HypothesisReport r;
    r.M = M;
    r.nu0 = nu0;
    r.omega = omega;
    r.delay_r = delay_r;
    r.c0 = c0;
    r.c1 = c1;
    r.c2 = c2;
    r.a = std::move(a);

    const double abs_nu0 = -nu0;
    const double sum_a = std::accumulate(r.a.begin(), r.a.end(), 0.0);
    double log_sum = 0.0;
    for (double ak : r.a) log_sum += std::log1p(M * ak);
    const double delayed_c2 = c2 * std::exp(-nu0 * delay_r);

    r.H3_margin = abs_nu0 / M - ((c1 + c2) + sum_a / omega);
    r.H3prime_margin = abs_nu0 / M - ((c1 + delayed_c2) + sum_a / omega);
    r.kappa = (M / abs_nu0) * (c1 + c2) + M * sum_a / (abs_nu0 * omega);
    r.sigma = abs_nu0 - log_sum / omega - M * (c1 + delayed_c2);

    double worst_sum = impulse_times.empty() ? sum_a : 0.0;
    for (double tj : impulse_times) {
        double s = 0.0;
        for (std::size_t k = 0; k < r.a.size(); ++k) {
            double lag = std::fmod(tj - impulse_times[k], omega);
            if (lag < 0.0) lag += omega;
            s += r.a[k] * std::exp(nu0 * lag);
        }
        worst_sum = std::max(worst_sum, s);
    }
    r.kappa_sup = (M / abs_nu0) * (c1 + c2) - M * worst_sum / std::expm1(nu0 * omega);
    return r;
}

std::optional<HypothesisReport> declared_report(const ProblemSpec& problem, double M) {
    const auto& d = problem.nonlinearity.declared;
    const auto& a = problem.impulses.lipschitz();
    if (!d.c1 || !d.c2 || (!a && problem.impulses.count() > 0)) return std::nullopt;
    if (!problem.op.exponentially_stable()) return std::nullopt;
    return report_from_constants(M, growth_exponent(problem.op), problem.period_omega,
                                 problem.delay_r, d.c0, *d.c1, *d.c2,
                                 a ? *a : std::vector<double>{}, problem.impulses.times());
}

namespace {

class Sampler {
public:
    Sampler(std::uint64_t seed, double radius, std::size_t dim)
        : rng_(seed), unit_(-1.0, 1.0), radius_(radius), dim_(static_cast<Eigen::Index>(dim)) {}

    double uniform() { return unit_(rng_); }

    Eigen::VectorXd state(double scale) {
        Eigen::VectorXd v(dim_);
        for (Eigen::Index i = 0; i < dim_; ++i) v[i] = scale * radius_ * unit_(rng_);
        return v;
    }

    HistorySegment history(double delay, double scale) {
        return HistorySegment::sample(delay, delay / 16.0, static_cast<std::size_t>(dim_),
                                      [&](double) { return state(scale); });
    }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_;
    double radius_;
    Eigen::Index dim_;
};

bool exceeds(double lhs, double rhs) { return lhs > rhs * (1.0 + 1e-9) + 1e-13; }

}  // namespace

HypothesisReport build_report(const ProblemSpec& problem, double M,
                              const SpotCheckOptions& options) {
    const auto& d = problem.nonlinearity.declared;
    if (!d.c1 || !d.c2) throw InvalidInput("nonlinearity does not declare c1 and c2");
    if (problem.impulses.count() > 0 && !problem.impulses.lipschitz()) {
        throw InvalidInput("impulse schedule does not declare its Lipschitz constants a_k");
    }
    problem.op.require_exponentially_stable();
    HypothesisReport report = *declared_report(problem, M);

    Sampler sampler(options.seed, options.radius, problem.dimension());
    const auto& f = problem.nonlinearity.eval;
    const double omega = problem.period_omega;
    const double r = problem.delay_r;
    auto note = [&](const std::string& what) {
        ++report.violation_count;
        if (report.violations.size() < 5) report.violations.push_back(what);
    };

    for (std::size_t k = 0; k < problem.impulses.count(); ++k) {
        const Eigen::VectorXd zero = Eigen::VectorXd::Zero(
            static_cast<Eigen::Index>(problem.dimension()));
        if (problem.impulses.apply(k, zero).norm() > 1e-13) {
            note("I_" + std::to_string(k + 1) + "(0) != 0");
        }
    }

    for (std::size_t i = 0; i < options.samples; ++i) {
        // Alternate far pairs with near pairs that probe the local slope.
        const double spread = (i % 2 == 0) ? 1.0 : 1e-3;
        const double t = omega * 0.5 * (1.0 + sampler.uniform());
        const Eigen::VectorXd x = sampler.state(1.0);
        const Eigen::VectorXd y = (i % 2 == 0) ? sampler.state(1.0) : Eigen::VectorXd(x + sampler.state(spread));
        const HistorySegment phi = sampler.history(r, 1.0);
        const HistorySegment psi = (i % 2 == 0)
                                       ? sampler.history(r, 1.0)
                                       : HistorySegment::combine(1.0, phi, 1.0, sampler.history(r, spread));

        const Eigen::VectorXd fx = f(t, x, phi);
        const Eigen::VectorXd fy = f(t, y, psi);
        const double dx = (x - y).norm();
        const double dphi = HistorySegment::combine(1.0, phi, -1.0, psi).sup_norm();
        const double lhs = (fx - fy).norm();
        if (exceeds(lhs, *d.c1 * dx + *d.c2 * dphi)) {
            std::ostringstream os;
            os.precision(6);
            os << "(H1') at t=" << t << ": |dF|=" << lhs << " > " << *d.c1 * dx + *d.c2 * dphi;
            note(os.str());
        }
        if (d.c0 && exceeds(fx.norm(), *d.c0 + *d.c1 * x.norm() + *d.c2 * phi.sup_norm())) {
            note("(H1) growth bound violated at t=" + std::to_string(t));
        }
        const Eigen::VectorXd shifted = f(t + omega, x, phi);
        if ((shifted - fx).norm() > 1e-9 * (1.0 + fx.norm())) {
            note("F is not omega-periodic at t=" + std::to_string(t));
        }
        for (std::size_t k = 0; k < problem.impulses.count(); ++k) {
            const double ak = (*problem.impulses.lipschitz())[k];
            const double jump_diff =
                (problem.impulses.apply(k, x) - problem.impulses.apply(k, y)).norm();
            if (exceeds(jump_diff, ak * dx)) {
                std::ostringstream os;
                os.precision(6);
                os << "(H2) for I_" << k + 1 << ": |dI|=" << jump_diff << " > a_k|dx|=" << ak * dx;
                note(os.str());
            }
        }
        ++report.samples_checked;
    }
    report.constants_verified = report.violation_count == 0;
    return report;
}

double gronwall_bound(double phi_norm, double alpha1, double alpha2,
                      const std::vector<std::pair<double, double>>& beta, double t) {
    if (!(phi_norm >= 0.0) || !(alpha1 >= 0.0) || !(alpha2 >= 0.0) || !(t >= 0.0)) {
        throw InvalidInput("gronwall_bound: arguments must be non-negative");
    }
    double product = 1.0;
    double prev = 0.0;
    for (const auto& [tk, bk] : beta) {
        if (!(tk > 0.0) || tk < prev) {
            throw InvalidInput("gronwall_bound: beta times must be positive and ascending");
        }
        if (!(bk >= 0.0)) throw InvalidInput("gronwall_bound: beta values must be >= 0");
        prev = tk;
        if (tk < t) product *= 1.0 + bk;
    }
    return phi_norm * product * std::exp((alpha1 + alpha2) * t);
}

double fitted_decay_rate(const std::vector<double>& times, const std::vector<double>& errors) {
    const std::size_t n = std::min(times.size(), errors.size());
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    std::size_t count = 0;
    for (std::size_t i = n / 2; i < n; ++i) {
        if (!(errors[i] > 0.0) || !std::isfinite(errors[i])) continue;
        const double y = std::log(errors[i]);
        st += times[i];
        sy += y;
        stt += times[i] * times[i];
        sty += times[i] * y;
        ++count;
    }
    if (count < 2) return std::numeric_limits<double>::quiet_NaN();
    const double c = static_cast<double>(count);
    const double denom = c * stt - st * st;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(c * sty - st * sy) / denom;
}

DecayRecord decay_experiment(const ProblemSpec& problem, const PeriodicSolution& ustar,
                             const HistorySegment& phi, int n_periods,
                             const IntegratorConfig& cfg) {
    if (n_periods < 1) throw InvalidInput("n_periods must be >= 1");
    DecayRecord rec;
    const auto report = declared_report(problem, problem.op.growth_bound());
    rec.applicable = report && report->h3prime_holds();
    if (report) {
        rec.sigma = report->sigma;
        if (report->h3prime_holds() && !(report->sigma > 0.0)) {
            throw InternalConsistencyError("sigma <= 0 although (H3') holds");
        }
    }

    const Trajectory traj =
        integrate_ivp(problem, phi, problem.period_omega * n_periods, cfg);
    const double h = traj.grid_step();
    if (std::abs(h - ustar.grid_step()) > 1e-12 * h) {
        throw InvalidInput("periodic solution and integration use different grids");
    }
    const double nu0 = growth_exponent(problem.op);

    // C(phi) = sup_{s in [-r,0]} exp(-nu0 s) ||phi(s) - u*(s)||, over nodes and right limits.
    for (std::size_t i = 0; i < phi.node_count(); ++i) {
        const double s = phi.offsets()[i];
        const double weight = std::exp(-nu0 * s);
        rec.c_phi = std::max(rec.c_phi,
                             weight * (phi.value_at(s) - ustar.value_at(s)).norm());
        rec.c_phi = std::max(rec.c_phi, weight * (phi.value_at(s, Side::right) -
                                                  ustar.value_at(s, Side::right))
                                                     .norm());
    }

    rec.allowance = 1e-8 + h * h * (ustar.one_period.pc_norm() + phi.sup_norm());

    const TimeGrid grid =
        TimeGrid::build(problem.period_omega, problem.impulses.times(), cfg.grid_step);
    double growth = 0.0;
    if (report) growth = nu0 + report->M * (report->c1 + report->c2 * std::exp(-nu0 * problem.delay_r));
    double product = 1.0;

    const long last = traj.last_node();
    rec.times.reserve(static_cast<std::size_t>(last + 1));
    for (long j = 0; j <= last; ++j) {
        const double t = traj.time(j);
        if (j > 0 && report) {
            const int k = grid.impulse_at(j - 1);
            if (k >= 0 && j - 1 > 0) product *= 1.0 + report->M * report->a[static_cast<std::size_t>(k)];
        }
        const double e = (traj.sample(j) - ustar.at_node(j)).norm();
        rec.times.push_back(t);
        rec.errors.push_back(e);
        const double env = rec.c_phi * std::exp(-rec.sigma * t);
        const double prod_env = rec.c_phi * product * std::exp(growth * t);
        rec.envelope.push_back(env);
        rec.product_envelope.push_back(prod_env);
        if (rec.applicable) {
            if (e > env + rec.allowance) ++rec.violations;
            if (e > prod_env + rec.allowance) ++rec.product_violations;
            if (env > 0.0) rec.worst_ratio = std::max(rec.worst_ratio, e / env);
        }
    }
    rec.fitted_rate = fitted_decay_rate(rec.times, rec.errors);
    return rec;
}

}  // namespace impdelay
