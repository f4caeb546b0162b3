#include "impdelay/history.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "impdelay/errors.hpp"

namespace impdelay {

namespace {

double offset_tolerance(double delay) { return 1e-12 * (1.0 + delay); }

}  // namespace

HistorySegment::HistorySegment(std::vector<double> offsets, Eigen::MatrixXd values,
                               std::vector<SegmentJump> jumps)
    : offsets_(std::move(offsets)), values_(std::move(values)), jumps_(std::move(jumps)) {
    if (offsets_.size() < 2) throw InvalidInput("history segment needs at least two nodes");
    if (static_cast<std::size_t>(values_.cols()) != offsets_.size()) {
        throw InvalidInput("history segment: one value column per node required");
    }
    if (values_.rows() == 0) throw InvalidInput("history segment: empty state dimension");
    if (offsets_.back() != 0.0) throw InvalidInput("history segment must end at offset 0");
    if (!(offsets_.front() < 0.0)) throw InvalidInput("history segment needs delay r > 0");
    for (std::size_t i = 1; i < offsets_.size(); ++i) {
        if (!(offsets_[i] > offsets_[i - 1])) {
            throw InvalidInput("history segment offsets must be strictly increasing");
        }
    }
    const double tol = offset_tolerance(delay());
    jump_slot_.assign(offsets_.size(), -1);
    std::sort(jumps_.begin(), jumps_.end(),
              [](const SegmentJump& a, const SegmentJump& b) { return a.offset < b.offset; });
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        auto& jmp = jumps_[k];
        if (jmp.right.size() != values_.rows()) {
            throw InvalidInput("history segment: jump dimension mismatch");
        }
        std::size_t node = locate(jmp.offset);
        if (std::abs(offsets_[node] - jmp.offset) > tol) {
            throw InvalidInput("history segment: jump at offset " + std::to_string(jmp.offset) +
                               " is not a node");
        }
        if (node + 1 == offsets_.size()) {
            throw InvalidInput("history segment: no right limit exists at offset 0");
        }
        if (jump_slot_[node] != -1) throw InvalidInput("history segment: duplicate jump");
        jmp.offset = offsets_[node];
        jump_slot_[node] = static_cast<int>(k);
    }
}

HistorySegment HistorySegment::sample(double delay, double h, std::size_t dimension,
                                      const std::function<StateVector(double)>& f) {
    if (!(delay > 0.0) || !(h > 0.0)) throw InvalidInput("history: need r > 0 and h > 0");
    const double q = delay / h;
    auto whole = static_cast<std::size_t>(std::floor(q + 1e-9));
    const bool partial = q - static_cast<double>(whole) > 1e-9;
    std::vector<double> offsets;
    offsets.reserve(whole + 2);
    if (partial) offsets.push_back(-delay);
    for (std::size_t m = whole; m > 0; --m) offsets.push_back(-static_cast<double>(m) * h);
    offsets.push_back(0.0);
    if (!partial) offsets.front() = -delay;

    Eigen::MatrixXd values(static_cast<Eigen::Index>(dimension),
                           static_cast<Eigen::Index>(offsets.size()));
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        StateVector v = f(offsets[i]);
        if (static_cast<std::size_t>(v.size()) != dimension) {
            throw InvalidInput("history sampler returned wrong dimension");
        }
        values.col(static_cast<Eigen::Index>(i)) = v;
    }
    return HistorySegment(std::move(offsets), std::move(values));
}

HistorySegment HistorySegment::constant(double delay, double h, const StateVector& value) {
    return sample(delay, h, static_cast<std::size_t>(value.size()),
                  [&](double) { return value; });
}

std::size_t HistorySegment::locate(double s) const {
    // Index of the last node with offset <= s (+ tolerance), clamped to a valid cell start.
    const double tol = offset_tolerance(delay());
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), s + tol);
    if (it == offsets_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
}

const SegmentJump* HistorySegment::jump_at(std::size_t node) const {
    int slot = jump_slot_[node];
    return slot < 0 ? nullptr : &jumps_[static_cast<std::size_t>(slot)];
}

StateVector HistorySegment::value_at(double s, Side side) const {
    const double tol = offset_tolerance(delay());
    if (s < offsets_.front() - tol || s > tol) {
        throw InvalidInput("history offset " + std::to_string(s) + " outside [-r, 0]");
    }
    std::size_t k = locate(s);
    if (std::abs(offsets_[k] - s) <= tol) {
        if (side == Side::right) {
            if (const auto* j = jump_at(k)) return j->right;
        }
        return values_.col(static_cast<Eigen::Index>(k));
    }
    // Interior of the cell (offsets_[k], offsets_[k+1]).
    const double a = offsets_[k];
    const double b = offsets_[k + 1];
    const double theta = (s - a) / (b - a);
    StateVector start = values_.col(static_cast<Eigen::Index>(k));
    if (const auto* j = jump_at(k)) start = j->right;
    return (1.0 - theta) * start + theta * values_.col(static_cast<Eigen::Index>(k + 1));
}

StateVector HistorySegment::integrate(const std::function<double(double)>& weight) const {
    StateVector acc = StateVector::Zero(values_.rows());
    double w_prev = weight(offsets_[0]);
    for (std::size_t k = 0; k + 1 < offsets_.size(); ++k) {
        const double w_next = weight(offsets_[k + 1]);
        const double half = 0.5 * (offsets_[k + 1] - offsets_[k]);
        const auto* j = jump_at(k);
        if (j != nullptr) {
            acc += half * w_prev * j->right;
        } else {
            acc += half * w_prev * values_.col(static_cast<Eigen::Index>(k));
        }
        acc += half * w_next * values_.col(static_cast<Eigen::Index>(k + 1));
        w_prev = w_next;
    }
    return acc;
}

double HistorySegment::sup_norm() const {
    double best = values_.colwise().norm().maxCoeff();
    for (const auto& j : jumps_) best = std::max(best, j.right.norm());
    return best;
}

HistorySegment HistorySegment::combine(double alpha, const HistorySegment& a, double beta,
                                       const HistorySegment& b) {
    if (a.offsets_.size() != b.offsets_.size() || a.values_.rows() != b.values_.rows()) {
        throw InvalidInput("history combine: node sets differ");
    }
    const double tol = offset_tolerance(a.delay());
    for (std::size_t i = 0; i < a.offsets_.size(); ++i) {
        if (std::abs(a.offsets_[i] - b.offsets_[i]) > tol) {
            throw InvalidInput("history combine: node sets differ");
        }
    }
    Eigen::MatrixXd values = alpha * a.values_ + beta * b.values_;
    std::vector<SegmentJump> jumps;
    for (std::size_t i = 0; i + 1 < a.offsets_.size(); ++i) {
        if (a.jump_at(i) == nullptr && b.jump_at(i) == nullptr) continue;
        const double s = a.offsets_[i];
        jumps.push_back({s, alpha * a.value_at(s, Side::right) + beta * b.value_at(s, Side::right)});
    }
    return HistorySegment(a.offsets_, std::move(values), std::move(jumps));
}

double history_norm(const HistorySegment& phi) { return phi.sup_norm(); }

HistorySegment random_history(double delay, double h, std::size_t dimension, double norm,
                              std::uint64_t seed) {
    if (!(norm >= 0.0)) throw InvalidInput("random history: norm must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    HistorySegment raw = HistorySegment::sample(delay, h, dimension, [&](double) {
        StateVector v(static_cast<Eigen::Index>(dimension));
        for (auto& c : v) c = unit(rng);
        return v;
    });
    const double size = raw.sup_norm();
    if (size == 0.0) return raw;
    return HistorySegment::combine(norm / size, raw, 0.0, raw);
}

}  // namespace impdelay
