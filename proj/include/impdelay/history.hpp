#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "impdelay/spectral.hpp"

namespace impdelay {

enum class Side { left, right };

/// Right limit of a history segment at an interior offset.
struct SegmentJump {
    double offset;
    StateVector right;
};

/// A piecewise-continuous function on [-r, 0], represented by left-continuous
/// node values with linear interpolation between nodes. At a jump offset the
/// node value is the left limit and the recorded right limit is used on the
/// interval to its right.
///
/// Node offsets need not be uniform: segments cut from a time grid whose step
/// does not divide r carry a shorter first cell [-r, -m h].
class HistorySegment {
public:
    HistorySegment(std::vector<double> offsets, Eigen::MatrixXd values,
                   std::vector<SegmentJump> jumps = {});

    /// Nodes at 0, -h, -2h, ... down to -r (the last cell may be shorter).
    static HistorySegment sample(double delay, double h, std::size_t dimension,
                                 const std::function<StateVector(double)>& f);
    static HistorySegment constant(double delay, double h, const StateVector& value);

    double delay() const { return -offsets_.front(); }
    std::size_t dimension() const { return static_cast<std::size_t>(values_.rows()); }
    std::size_t node_count() const { return offsets_.size(); }

    std::span<const double> offsets() const { return offsets_; }
    const Eigen::MatrixXd& values() const { return values_; }
    std::span<const SegmentJump> jumps() const { return jumps_; }

    /// Value at offset s in [-r, 0]. Side::right selects the right limit at a jump.
    StateVector value_at(double s, Side side = Side::left) const;

    /// phi(0).
    StateVector newest() const { return values_.col(values_.cols() - 1); }

    /// Trapezoidal approximation of int_{-r}^0 weight(s) phi(s) ds, exact for
    /// piecewise-linear phi when the weight is constant.
    StateVector integrate(const std::function<double(double)>& weight) const;

    /// Sup-norm over node values and recorded right limits.
    double sup_norm() const;

    /// alpha * a + beta * b on a shared node set; jumps of either operand survive.
    static HistorySegment combine(double alpha, const HistorySegment& a, double beta,
                                  const HistorySegment& b);

private:
    std::size_t locate(double s) const;
    const SegmentJump* jump_at(std::size_t node) const;

    std::vector<double> offsets_;
    Eigen::MatrixXd values_;
    std::vector<SegmentJump> jumps_;
    std::vector<int> jump_slot_;  // node -> index into jumps_, or -1
};

/// ||phi||_Pr.
double history_norm(const HistorySegment& phi);

/// Node values drawn iid uniform on [-1, 1] per coordinate (mt19937_64 with the
/// given seed), then scaled so that ||phi||_Pr = norm.
HistorySegment random_history(double delay, double h, std::size_t dimension, double norm,
                              std::uint64_t seed);

}  // namespace impdelay
