#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "impdelay/history.hpp"
#include "impdelay/spectral.hpp"

namespace impdelay {

using ImpulseMap = std::function<StateVector(const StateVector&)>;

/// Impulse times 0 < t_1 < ... < t_p < omega on one period together with the
/// maps I_k, extended periodically: t_{k+p} = t_k + omega, I_{k+p} = I_k.
class ImpulseSchedule {
public:
    /// No impulses.
    explicit ImpulseSchedule(double omega);
    ImpulseSchedule(double omega, std::vector<double> times, std::vector<ImpulseMap> maps,
                    std::optional<std::vector<double>> lipschitz = std::nullopt);

    double period() const { return omega_; }
    std::size_t count() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }

    /// Time of the k-th impulse for any integer k (k = 0 is t_1).
    double time(long k) const;
    const ImpulseMap& map(std::size_t k) const { return maps_[k % maps_.size()]; }
    StateVector apply(std::size_t k, const StateVector& x) const;

    /// Declared Lipschitz constants a_k, if any.
    const std::optional<std::vector<double>>& lipschitz() const { return lipschitz_; }

private:
    double omega_;
    std::vector<double> times_;
    std::vector<ImpulseMap> maps_;
    std::optional<std::vector<double>> lipschitz_;
};

using ForcingFunction =
    std::function<StateVector(double t, const StateVector& x, const HistorySegment& phi)>;

/// Declared growth/Lipschitz constants of F:
///   ||F(t,x,phi)|| <= c0 + c1 ||x|| + c2 ||phi||_Pr
///   ||F(t,x,phi) - F(t,y,psi)|| <= c1 ||x - y|| + c2 ||phi - psi||_Pr
struct DeclaredConstants {
    std::optional<double> c0;
    std::optional<double> c1;
    std::optional<double> c2;
};

/// The right-hand side F(t, u(t), u_t), omega-periodic in t.
struct Nonlinearity {
    ForcingFunction eval;
    double period_omega = 0.0;
    DeclaredConstants declared;
};

/// u'(t) + A u(t) = F(t, u(t), u_t), Delta u(t_i) = I_i(u(t_i)), delay r, period omega.
struct ProblemSpec {
    SpectralOperator op;
    Nonlinearity nonlinearity;
    ImpulseSchedule impulses;
    double delay_r;
    double period_omega;

    ProblemSpec(SpectralOperator op, Nonlinearity f, ImpulseSchedule impulses, double delay_r,
                double period_omega);

    std::size_t dimension() const { return op.dimension(); }
};

enum class Scheme { etd1, etd2 };

const char* to_string(Scheme scheme);
Scheme parse_scheme(const std::string& text);

struct IntegratorConfig {
    /// Requested step; snapped to omega / N where N is the nearest integer,
    /// which must agree with omega / h to 1e-9 relative.
    double grid_step = 1e-3;
    Scheme scheme = Scheme::etd2;
    /// ETD2 solves its trapezoidal corrector by fixed-point sweeps until the
    /// update falls below this relative size.
    double corrector_tolerance = 1e-15;
    int max_corrector_sweeps = 20;
};

/// A uniform time grid t_j = j h commensurate with the period and the impulse times.
struct TimeGrid {
    double step;
    long steps_per_period;
    std::vector<long> impulse_nodes;  // node index of t_k within [0, N)
    std::vector<int> impulse_slot;    // per node in [0, N): impulse index or -1

    /// Validates and snaps; throws ConfigurationError naming the offending value.
    static TimeGrid build(double omega, const std::vector<double>& impulse_times, double h);

    /// The commensurate grid whose step is closest to, and not larger than, h.
    static TimeGrid nearest(double omega, const std::vector<double>& impulse_times, double h);

    /// Impulse index k (within one period) at node j, or -1.
    int impulse_at(long node) const;

    double time(long node) const { return static_cast<double>(node) * step; }
};

/// Index n with |t - n h| <= 1e-9 max(1, |t/h|) h, or nullopt.
std::optional<long> grid_index(double t, double h);

}  // namespace impdelay
