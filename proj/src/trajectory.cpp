#include "impdelay/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impdelay/errors.hpp"
#include "impdelay/problem.hpp"

namespace impdelay {

Trajectory::Trajectory(double step, long first_node, Eigen::MatrixXd samples,
                       std::vector<JumpRecord> jumps, std::optional<HistorySegment> prefix)
    : step_(step),
      first_node_(first_node),
      samples_(std::move(samples)),
      jumps_(std::move(jumps)),
      prefix_(std::move(prefix)) {
    if (!(step_ > 0.0)) throw InvalidInput("trajectory step must be > 0");
    if (samples_.cols() == 0 || samples_.rows() == 0) throw InvalidInput("empty trajectory");
    jump_slot_.assign(static_cast<std::size_t>(samples_.cols()), -1);
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        Eigen::Index col = column(jumps_[k].node);
        if (jump_slot_[static_cast<std::size_t>(col)] != -1) {
            throw InvalidInput("trajectory: duplicate jump record");
        }
        jump_slot_[static_cast<std::size_t>(col)] = static_cast<int>(k);
    }
    if (prefix_ && static_cast<std::size_t>(prefix_->dimension()) != dimension()) {
        throw InvalidInput("trajectory prefix dimension mismatch");
    }
}

double Trajectory::domain_start() const {
    return prefix_ ? start_time() - prefix_->delay() : start_time();
}

Eigen::Index Trajectory::column(long node) const {
    if (node < first_node_ || node > last_node()) {
        throw InvalidInput("node " + std::to_string(node) + " outside trajectory");
    }
    return static_cast<Eigen::Index>(node - first_node_);
}

const JumpRecord* Trajectory::jump_at(long node) const {
    int slot = jump_slot_[static_cast<std::size_t>(column(node))];
    return slot < 0 ? nullptr : &jumps_[static_cast<std::size_t>(slot)];
}

Eigen::VectorXd Trajectory::right_limit(long node) const {
    if (const auto* j = jump_at(node)) return j->right;
    return sample(node);
}

StateVector Trajectory::value_at(double t, Side side) const {
    const double tol = 1e-9 * step_;
    if (t < start_time() - tol) {
        if (!prefix_ || t < domain_start() - tol) {
            throw InvalidInput("time " + std::to_string(t) + " before trajectory domain");
        }
        return prefix_->value_at(std::max(t - start_time(), -prefix_->delay()), side);
    }
    if (t > end_time() + tol) throw InvalidInput("time " + std::to_string(t) + " after trajectory");
    if (auto node = grid_index(t, step_)) {
        return side == Side::right ? right_limit(*node) : sample(*node);
    }
    const double q = t / step_;
    const auto node0 = static_cast<long>(std::floor(q));
    const double theta = q - static_cast<double>(node0);
    return (1.0 - theta) * right_limit(node0) + theta * sample(node0 + 1);
}

double Trajectory::pc_norm() const {
    double best = samples_.colwise().norm().maxCoeff();
    for (const auto& j : jumps_) best = std::max(best, j.right.norm());
    return best;
}

double pc_distance(const Trajectory& a, const Trajectory& b) {
    if (a.first_node() != b.first_node() || a.size() != b.size() ||
        a.dimension() != b.dimension() || a.grid_step() != b.grid_step()) {
        throw InvalidInput("pc_distance: trajectories live on different grids");
    }
    double best = (a.samples() - b.samples()).colwise().norm().maxCoeff();
    auto check_rights = [&](const Trajectory& x) {
        for (const auto& j : x.jumps()) {
            best = std::max(best, (a.right_limit(j.node) - b.right_limit(j.node)).norm());
        }
    };
    check_rights(a);
    check_rights(b);
    return best;
}

void GridSource::interpolate(long node0, double theta, Eigen::Ref<Eigen::VectorXd> out) const {
    Eigen::VectorXd next(out.size());
    left(node0 + 1, next);
    if (!right(node0, out)) left(node0, out);
    out = (1.0 - theta) * out + theta * next;
}

SampledSource::SampledSource(double step, long first_node, const Eigen::MatrixXd& samples,
                             const std::vector<JumpRecord>& jumps,
                             const std::vector<int>& jump_slot, const HistorySegment* prefix,
                             long wrap_period)
    : step_(step),
      first_node_(first_node),
      samples_(samples),
      jumps_(jumps),
      jump_slot_(jump_slot),
      prefix_(prefix),
      wrap_(wrap_period) {}

SampledSource::SampledSource(const Trajectory& traj)
    : SampledSource(traj.grid_step(), traj.first_node(), traj.samples(), traj.jumps(),
                    traj.jump_slots(), traj.prefix() ? &*traj.prefix() : nullptr) {}

Eigen::Index SampledSource::column(long node) const {
    if (wrap_ > 0) {
        long j = (node - first_node_) % wrap_;
        if (j < 0) j += wrap_;
        return static_cast<Eigen::Index>(j);
    }
    return static_cast<Eigen::Index>(node - first_node_);
}

void SampledSource::left(long node, Eigen::Ref<Eigen::VectorXd> out) const {
    if (wrap_ == 0 && node < first_node_) {
        if (prefix_ == nullptr) throw InvalidInput("grid lookup before data start");
        out = prefix_->value_at(static_cast<double>(node - first_node_) * step_, Side::left);
        return;
    }
    Eigen::Index col = column(node);
    if (col >= samples_.cols()) throw InvalidInput("grid lookup after data end");
    out = samples_.col(col);
}

bool SampledSource::right(long node, Eigen::Ref<Eigen::VectorXd> out) const {
    if (wrap_ == 0 && node < first_node_) {
        if (prefix_ == nullptr) throw InvalidInput("grid lookup before data start");
        const double s = static_cast<double>(node - first_node_) * step_;
        for (const auto& j : prefix_->jumps()) {
            if (std::abs(j.offset - s) <= 1e-9 * step_) {
                out = j.right;
                return true;
            }
        }
        return false;
    }
    Eigen::Index col = column(node);
    if (col >= static_cast<Eigen::Index>(jump_slot_.size())) return false;
    int slot = jump_slot_[static_cast<std::size_t>(col)];
    if (slot < 0) return false;
    out = jumps_[static_cast<std::size_t>(slot)].right;
    return true;
}

void SampledSource::interpolate(long node0, double theta, Eigen::Ref<Eigen::VectorXd> out) const {
    if (wrap_ == 0 && prefix_ != nullptr && node0 + 1 <= first_node_) {
        const double s = (static_cast<double>(node0 - first_node_) + theta) * step_;
        out = prefix_->value_at(s, Side::left);
        return;
    }
    GridSource::interpolate(node0, theta, out);
}

WindowLayout WindowLayout::make(double step, double delay) {
    if (!(step > 0.0) || !(delay > 0.0)) throw InvalidInput("window needs h > 0 and r > 0");
    const double q = delay / step;
    auto whole = static_cast<long>(std::floor(q + 1e-9));
    double remainder = q - static_cast<double>(whole);
    if (remainder <= 1e-9) remainder = 0.0;
    WindowLayout layout{step, delay, whole, remainder, {}};
    layout.offsets.reserve(static_cast<std::size_t>(whole) + 2);
    if (remainder > 0.0) layout.offsets.push_back(-delay);
    for (long m = whole; m > 0; --m) layout.offsets.push_back(-static_cast<double>(m) * step);
    layout.offsets.push_back(0.0);
    if (remainder == 0.0) layout.offsets.front() = -delay;
    return layout;
}

HistorySegment cut_window(const GridSource& source, const WindowLayout& layout, long node) {
    const Eigen::Index dim = source.dimension();
    const auto cols = static_cast<Eigen::Index>(layout.offsets.size());
    Eigen::MatrixXd values(dim, cols);
    std::vector<SegmentJump> jumps;
    Eigen::VectorXd scratch(dim);
    const long first = node - layout.whole;
    Eigen::Index col = 0;
    if (layout.remainder > 0.0) {
        // t - r lies in the cell [first - 1, first] at fraction 1 - remainder.
        source.interpolate(first - 1, 1.0 - layout.remainder, values.col(col));
        ++col;
    }
    for (long j = first; j <= node; ++j, ++col) {
        source.left(j, values.col(col));
        if (j < node && source.right(j, scratch)) {
            jumps.push_back({layout.offsets[static_cast<std::size_t>(col)], scratch});
        }
    }
    return HistorySegment(layout.offsets, std::move(values), std::move(jumps));
}

HistorySegment history_at(const Trajectory& traj, double t, double delay) {
    auto node = grid_index(t, traj.grid_step());
    if (!node) throw InvalidInput("history_at: t is not a grid time");
    if (t - delay < traj.domain_start() - 1e-9 * traj.grid_step() || *node > traj.last_node()) {
        throw InvalidInput("history_at: window [t - r, t] escapes the trajectory domain");
    }
    SampledSource source(traj);
    return cut_window(source, WindowLayout::make(traj.grid_step(), delay), *node);
}

}  // namespace impdelay
