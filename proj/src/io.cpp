#include "impdelay/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "impdelay/errors.hpp"

namespace impdelay {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string format_list(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(values[i]);
    }
    return out;
}

void KeyValueReport::add(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
}

void KeyValueReport::add(const std::string& key, long value) {
    entries_.emplace_back(key, std::to_string(value));
}

void KeyValueReport::add(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
}

void KeyValueReport::add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void KeyValueReport::write(std::ostream& os) const {
    for (const auto& [k, v] : entries_) os << k << " = " << v << '\n';
}

namespace {

void write_row(std::ostream& os, double t, const Eigen::VectorXd& v, const char* side) {
    os << format_double(t) << ',' << format_double(v.norm());
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ',' << format_double(v[i]);
    os << ',' << side << '\n';
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,norm";
    for (std::size_t i = 1; i <= traj.dimension(); ++i) os << ",c" << i;
    os << ",side\n";
    for (long j = traj.first_node(); j <= traj.last_node(); ++j) {
        const double t = traj.time(j);
        if (const JumpRecord* jump = traj.jump_at(j)) {
            write_row(os, t, jump->left, "L");
            write_row(os, t, jump->right, "R");
        } else {
            write_row(os, t, traj.sample(j), "-");
        }
    }
}

void write_decay_csv(std::ostream& os, const DecayRecord& record) {
    os << "t,error,envelope,product_envelope\n";
    for (std::size_t i = 0; i < record.times.size(); ++i) {
        os << format_double(record.times[i]) << ',' << format_double(record.errors[i]) << ','
           << format_double(record.envelope[i]) << ',' << format_double(record.product_envelope[i])
           << '\n';
    }
}

void write_picard_csv(std::ostream& os, const PeriodicSolution& solution) {
    os << "iteration,difference,ratio\n";
    for (std::size_t m = 0; m < solution.differences.size(); ++m) {
        os << m + 1 << ',' << format_double(solution.differences[m]) << ',';
        if (m > 0) os << format_double(solution.ratios[m - 1]);
        os << '\n';
    }
}

void add_hypotheses(KeyValueReport& r, const HypothesisReport& h) {
    r.add("M", h.M);
    r.add("nu0", h.nu0);
    r.add("omega", h.omega);
    r.add("delay_r", h.delay_r);
    r.add("c0", h.c0 ? format_double(*h.c0) : std::string("undeclared"));
    r.add("c1", h.c1);
    r.add("c2", h.c2);
    r.add("a", format_list(h.a));
    r.add("H3_margin", h.H3_margin);
    r.add("H3prime_margin", h.H3prime_margin);
    r.add("H3_holds", h.h3_holds());
    r.add("H3prime_holds", h.h3prime_holds());
    r.add("kappa", h.kappa);
    r.add("kappa_sup", h.kappa_sup);
    r.add("sigma", h.sigma);
    r.add("constants_verified", h.constants_verified);
    r.add("spot_check_samples", h.samples_checked);
    r.add("spot_check_violations", h.violation_count);
    for (std::size_t i = 0; i < h.violations.size(); ++i) {
        r.add("spot_check_violation_" + std::to_string(i + 1), h.violations[i]);
    }
}

void add_periodic(KeyValueReport& r, const PeriodicSolution& p) {
    r.add("period", p.period);
    r.add("grid_step", p.grid_step());
    r.add("nodes_per_period", p.nodes_per_period());
    r.add("periodic_residual", p.residual);
    r.add("iterations", p.iterations_used);
    r.add("kappa_estimate", p.contraction_estimate);
    r.add("measured_ratio", p.measured_ratio);
    r.add("contraction", p.contraction_verified ? "verified" : "unverified");
    r.add("periodic_pc_norm", p.one_period.pc_norm());
}

void add_decay(KeyValueReport& r, const DecayRecord& d) {
    r.add("decay_applicable", d.applicable);
    r.add("decay_sigma", d.sigma);
    r.add("decay_C_phi", d.c_phi);
    r.add("decay_allowance", d.allowance);
    r.add("decay_nodes", d.times.size());
    r.add("decay_violations", d.violations);
    r.add("decay_product_violations", d.product_violations);
    r.add("decay_worst_ratio", d.worst_ratio);
    r.add("fitted_rate", d.fitted_rate);
    r.add("fitted_rate_at_least_sigma", d.fitted_rate >= d.sigma);
    r.add("decay_bound_holds", d.bound_holds());
}

HistorySegment read_history_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open history file '" + path + "'");
    std::vector<double> offsets;
    std::vector<std::vector<double>> rows;
    std::vector<SegmentJump> jumps;
    std::string line;
    std::size_t dim = 0;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line[0] == 's') continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            const char* b = cell.data();
            while (*b == ' ') ++b;
            auto res = std::from_chars(b, cell.data() + cell.size(), v);
            if (res.ec != std::errc()) {
                throw InvalidInput(path + ":" + std::to_string(line_no) + ": bad number '" +
                                   cell + "'");
            }
            fields.push_back(v);
        }
        if (fields.size() < 2) throw InvalidInput(path + ":" + std::to_string(line_no) + ": too few columns");
        if (dim == 0) dim = fields.size() - 1;
        if (fields.size() - 1 != dim) {
            throw InvalidInput(path + ":" + std::to_string(line_no) + ": column count changed");
        }
        const double s = fields[0];
        std::vector<double> v(fields.begin() + 1, fields.end());
        if (!offsets.empty() && s == offsets.back()) {
            jumps.push_back({s, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim))});
            continue;
        }
        offsets.push_back(s);
        rows.push_back(std::move(v));
    }
    if (offsets.size() < 2) throw InvalidInput("history file '" + path + "' needs at least two rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        values.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Eigen::VectorXd>(rows[i].data(), static_cast<Eigen::Index>(dim));
    }
    return HistorySegment(std::move(offsets), std::move(values), std::move(jumps));
}

void write_text_file(const std::string& dir, const std::string& name, const std::string& contents) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << contents;
    if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
}

}  // namespace impdelay
