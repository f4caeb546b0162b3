#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "impdelay/analysis.hpp"
#include "impdelay/history.hpp"
#include "impdelay/periodic.hpp"
#include "impdelay/trajectory.hpp"

namespace impdelay {

/// 17 significant digits in %g style, independent of the locale.
std::string format_double(double x);

/// Comma-separated doubles, each with format_double.
std::string format_list(const std::vector<double>& values);

/// Ordered "key = value" lines.
class KeyValueReport {
public:
    void add(const std::string& key, double value);
    void add(const std::string& key, long value);
    void add(const std::string& key, int value) { add(key, static_cast<long>(value)); }
    void add(const std::string& key, std::size_t value) { add(key, static_cast<long>(value)); }
    void add(const std::string& key, bool value);
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    void write(std::ostream& os) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Header "t,norm,c1,...,cn,side". One row per node with side "-"; impulse nodes
/// get an "L" row (left limit, the stored sample) followed by an "R" row.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Header "t,error,envelope,product_envelope".
void write_decay_csv(std::ostream& os, const DecayRecord& record);

/// Header "iteration,difference,ratio"; the first ratio is empty.
void write_picard_csv(std::ostream& os, const PeriodicSolution& solution);

void add_hypotheses(KeyValueReport& report, const HypothesisReport& h);
void add_periodic(KeyValueReport& report, const PeriodicSolution& p);
void add_decay(KeyValueReport& report, const DecayRecord& d);

/// Reads a history from rows "s,c1,...,cn" with s ascending from -r to 0. A row
/// repeating the previous s gives the right limit there. Lines starting with '#'
/// and a header line starting with 's' are skipped.
HistorySegment read_history_csv(const std::string& path);

/// Writes `contents` to dir/name, creating dir. Throws InvalidInput on I/O failure.
void write_text_file(const std::string& dir, const std::string& name, const std::string& contents);

}  // namespace impdelay
