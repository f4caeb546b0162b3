#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "impdelay/history.hpp"
#include "impdelay/spectral.hpp"

namespace impdelay {

/// Left and right limits at an impulse node.
struct JumpRecord {
    long node;
    double time;
    StateVector left;
    StateVector right;
};

/// A piecewise-continuous numerical solution on the grid t_j = j h, j = first..last.
/// Samples are left-continuous values; right limits live in the jump records.
/// An optional prefix holds the initial history on [t_first - r, t_first].
class Trajectory {
public:
    Trajectory(double step, long first_node, Eigen::MatrixXd samples,
               std::vector<JumpRecord> jumps, std::optional<HistorySegment> prefix = std::nullopt);

    double grid_step() const { return step_; }
    long first_node() const { return first_node_; }
    long last_node() const { return first_node_ + static_cast<long>(samples_.cols()) - 1; }
    std::size_t size() const { return static_cast<std::size_t>(samples_.cols()); }
    std::size_t dimension() const { return static_cast<std::size_t>(samples_.rows()); }

    double time(long node) const { return static_cast<double>(node) * step_; }
    double start_time() const { return time(first_node_); }
    double end_time() const { return time(last_node()); }

    /// Earliest time with data, including the prefix.
    double domain_start() const;

    const Eigen::MatrixXd& samples() const { return samples_; }
    const std::vector<JumpRecord>& jumps() const { return jumps_; }
    const std::optional<HistorySegment>& prefix() const { return prefix_; }

    Eigen::VectorXd sample(long node) const { return samples_.col(column(node)); }
    const JumpRecord* jump_at(long node) const;
    Eigen::VectorXd right_limit(long node) const;

    /// u(t) by linear interpolation, with prefix lookup before the first node.
    StateVector value_at(double t, Side side = Side::left) const;

    /// Discrete ||u||_PC: sup over samples and right limits.
    double pc_norm() const;

    Eigen::Index column(long node) const;
    /// Per column: index into jumps() or -1.
    const std::vector<int>& jump_slots() const { return jump_slot_; }

private:
    double step_;
    long first_node_;
    Eigen::MatrixXd samples_;
    std::vector<JumpRecord> jumps_;
    std::vector<int> jump_slot_;
    std::optional<HistorySegment> prefix_;
};

/// sup over nodes of both left values and right limits of ||a - b||. Grids must match.
double pc_distance(const Trajectory& a, const Trajectory& b);

/// Read access to a piecewise-continuous function stored on a uniform grid.
class GridSource {
public:
    virtual ~GridSource() = default;

    virtual Eigen::Index dimension() const = 0;

    /// Left-continuous value at a node.
    virtual void left(long node, Eigen::Ref<Eigen::VectorXd> out) const = 0;

    /// Writes the right limit and returns true when the node carries a jump.
    virtual bool right(long node, Eigen::Ref<Eigen::VectorXd> out) const = 0;

    /// Value at t_{node0} + theta h, theta in (0, 1).
    virtual void interpolate(long node0, double theta, Eigen::Ref<Eigen::VectorXd> out) const;
};

/// Grid samples in a matrix (column = node - first_node) with jump records.
/// Nodes before first_node are read from an optional prefix history; with a
/// positive wrap period N the node index is taken modulo N instead.
class SampledSource final : public GridSource {
public:
    SampledSource(double step, long first_node, const Eigen::MatrixXd& samples,
                  const std::vector<JumpRecord>& jumps, const std::vector<int>& jump_slot,
                  const HistorySegment* prefix = nullptr, long wrap_period = 0);

    explicit SampledSource(const Trajectory& traj);

    Eigen::Index dimension() const override { return samples_.rows(); }
    void left(long node, Eigen::Ref<Eigen::VectorXd> out) const override;
    bool right(long node, Eigen::Ref<Eigen::VectorXd> out) const override;
    void interpolate(long node0, double theta, Eigen::Ref<Eigen::VectorXd> out) const override;

private:
    Eigen::Index column(long node) const;

    double step_;
    long first_node_;
    const Eigen::MatrixXd& samples_;
    const std::vector<JumpRecord>& jumps_;
    const std::vector<int>& jump_slot_;
    const HistorySegment* prefix_;
    long wrap_;
};

/// Node layout of the window [t - r, t] cut from a grid of step h.
struct WindowLayout {
    double step;
    double delay;
    long whole;       // number of full cells
    double remainder; // r / h - whole, zero when h divides r
    std::vector<double> offsets;

    static WindowLayout make(double step, double delay);
};

/// u_t for t = node h, as a history segment on [-r, 0].
HistorySegment cut_window(const GridSource& source, const WindowLayout& layout, long node);

/// Restriction of a trajectory to [t - r, t], re-indexed to [-r, 0].
HistorySegment history_at(const Trajectory& traj, double t, double delay);

}  // namespace impdelay
