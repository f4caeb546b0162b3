#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "impdelay/cli.hpp"
#include "impdelay/io.hpp"

namespace impdelay {

namespace {

namespace pt = boost::property_tree;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

class Section {
public:
    Section(std::string name, const pt::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (tree_ == nullptr) return std::nullopt;
        auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    std::optional<double> number(const std::string& key) {
        auto text = raw(key);
        if (!text) return std::nullopt;
        return to_double(key, *text);
    }

    std::optional<long> integer(const std::string& key) {
        auto text = raw(key);
        if (!text) return std::nullopt;
        long v = 0;
        auto res = std::from_chars(text->data(), text->data() + text->size(), v);
        if (res.ec != std::errc() || res.ptr != text->data() + text->size()) {
            throw ConfigurationError(where(key) + ": expected an integer, got '" + *text + "'");
        }
        return v;
    }

    std::optional<bool> boolean(const std::string& key) {
        auto text = raw(key);
        if (!text) return std::nullopt;
        if (*text == "true" || *text == "yes" || *text == "on" || *text == "1") return true;
        if (*text == "false" || *text == "no" || *text == "off" || *text == "0") return false;
        throw ConfigurationError(where(key) + ": expected true or false, got '" + *text + "'");
    }

    std::optional<std::vector<double>> list(const std::string& key) {
        auto text = raw(key);
        if (!text) return std::nullopt;
        std::vector<double> out;
        if (text->empty()) return out;
        std::stringstream ss(*text);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
        return out;
    }

    /// Throws on keys nobody asked for.
    void reject_unknown() const {
        if (tree_ == nullptr) return;
        for (const auto& [key, value] : *tree_) {
            if (!used_.count(key)) {
                throw ConfigurationError("unknown key '" + key + "' in section [" + name_ + "]");
            }
        }
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

private:
    double to_double(const std::string& key, const std::string& text) const {
        double v = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
            throw ConfigurationError(where(key) + ": expected a number, got '" + text + "'");
        }
        return v;
    }

    std::string name_;
    const pt::ptree* tree_;
    std::set<std::string> used_;
};

const char* to_string(ProblemType t) { return t == ProblemType::heat ? "heat" : "spectral"; }

const char* to_string(ImpulseKind k) {
    switch (k) {
        case ImpulseKind::linear: return "linear";
        case ImpulseKind::sine: return "sine";
        case ImpulseKind::constant: return "constant";
    }
    return "linear";
}

const char* to_string(ImpulseConstant c) {
    return c == ImpulseConstant::nominal ? "nominal" : "conservative";
}

const char* to_string(HistoryKind k) {
    switch (k) {
        case HistoryKind::zero: return "zero";
        case HistoryKind::constant: return "constant";
        case HistoryKind::random: return "random";
        case HistoryKind::samples: return "file";
    }
    return "zero";
}

template <class E>
E parse_enum(const std::string& where, const std::string& text,
             const std::map<std::string, E>& choices) {
    auto it = choices.find(text);
    if (it != choices.end()) return it->second;
    std::string names;
    for (const auto& [k, v] : choices) names += (names.empty() ? "" : ", ") + k;
    throw ConfigurationError(where + ": unknown value '" + text + "' (expected one of " + names + ")");
}

std::vector<double> heat_times(int p) {
    std::vector<double> t;
    for (int k = 1; k <= p; ++k) t.push_back((2.0 * k - 1.0) * std::numbers::pi / p);
    return t;
}

std::vector<double> impulse_times_of(const RunConfig& cfg) {
    return cfg.type == ProblemType::heat ? heat_times(cfg.impulses) : cfg.spectral.impulse_times;
}

}  // namespace

double RunConfig::omega() const { return type == ProblemType::heat ? kTwoPi : spectral.omega; }

double RunConfig::delay() const { return type == ProblemType::heat ? heat_delay : spectral.delay; }

RunConfig parse_config_string(const std::string& text) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigurationError("config: " + e.message() + " at line " + std::to_string(e.line()));
    }
    static const std::set<std::string> known{"problem", "integrator", "solver", "history", "output"};
    for (const auto& [name, sub] : tree) {
        if (!known.count(name)) throw ConfigurationError("unknown section [" + name + "]");
        if (sub.data().size() > 0 && sub.empty()) {
            throw ConfigurationError("key '" + name + "' outside of any section");
        }
    }
    auto section = [&](const char* name) {
        auto child = tree.get_child_optional(name);
        return Section(name, child ? &*child : nullptr);
    };

    RunConfig cfg;
    Section problem = section("problem");
    if (auto t = problem.raw("type")) {
        cfg.type = parse_enum<ProblemType>(problem.where("type"), *t,
                                           {{"spectral", ProblemType::spectral},
                                            {"heat", ProblemType::heat}});
    }
    if (cfg.type == ProblemType::heat) {
        if (auto v = problem.integer("modes")) cfg.modes = static_cast<int>(*v);
        if (auto v = problem.integer("impulses")) cfg.impulses = static_cast<int>(*v);
        if (auto v = problem.number("delay")) cfg.heat_delay = *v;
        if (auto v = problem.boolean("forcing")) cfg.forcing = *v;
        if (auto v = problem.raw("impulse_constant")) {
            cfg.impulse_constant = parse_enum<ImpulseConstant>(
                problem.where("impulse_constant"), *v,
                {{"nominal", ImpulseConstant::nominal}, {"conservative", ImpulseConstant::conservative}});
        }
        cfg.history.kind = HistoryKind::random;
    } else {
        auto& s = cfg.spectral;
        if (auto v = problem.list("eigenvalues")) s.eigenvalues = *v;
        if (auto v = problem.number("omega")) s.omega = *v;
        if (auto v = problem.number("delay")) s.delay = *v;
        if (auto v = problem.number("growth_bound")) s.growth_bound = *v;
        if (auto v = problem.number("state_gain")) s.state_gain = *v;
        if (auto v = problem.number("delay_gain")) s.delay_gain = *v;
        if (auto v = problem.number("sine_gain")) s.sine_gain = *v;
        if (auto v = problem.number("forcing_amplitude")) s.forcing_amplitude = *v;
        if (auto v = problem.list("impulse_times")) s.impulse_times = *v;
        if (auto v = problem.raw("impulse_type")) {
            s.impulse_type = parse_enum<ImpulseKind>(problem.where("impulse_type"), *v,
                                                     {{"linear", ImpulseKind::linear},
                                                      {"sine", ImpulseKind::sine},
                                                      {"constant", ImpulseKind::constant}});
        }
        if (auto v = problem.list("impulse_values")) s.impulse_values = *v;
        s.c0 = problem.number("c0");
        s.c1 = problem.number("c1");
        s.c2 = problem.number("c2");
        s.impulse_lipschitz = problem.list("impulse_lipschitz");
    }
    problem.reject_unknown();

    Section integrator = section("integrator");
    if (auto v = integrator.number("step")) {
        if (!(*v > 0.0)) throw ConfigurationError("[integrator] step: must be > 0");
        cfg.step = *v;
    }
    if (auto v = integrator.raw("scheme")) cfg.scheme = parse_scheme(*v);
    integrator.reject_unknown();

    Section solver = section("solver");
    if (auto v = solver.number("tol")) cfg.tol = *v;
    if (auto v = solver.integer("max_iter")) cfg.max_iter = static_cast<int>(*v);
    if (auto v = solver.integer("periods")) cfg.periods = static_cast<int>(*v);
    if (auto v = solver.number("t_end")) {
        if (!(*v > 0.0)) throw ConfigurationError("[solver] t_end: must be > 0");
        cfg.t_end = *v;
    }
    if (auto v = solver.integer("samples")) {
        if (*v < 1) throw ConfigurationError("[solver] samples: must be >= 1");
        cfg.samples = static_cast<std::size_t>(*v);
    }
    solver.reject_unknown();

    Section history = section("history");
    if (auto v = history.raw("kind")) {
        cfg.history.kind = parse_enum<HistoryKind>(history.where("kind"), *v,
                                                   {{"zero", HistoryKind::zero},
                                                    {"constant", HistoryKind::constant},
                                                    {"random", HistoryKind::random},
                                                    {"file", HistoryKind::samples}});
    }
    if (auto v = history.number("value")) cfg.history.value = *v;
    if (auto v = history.number("norm")) cfg.history.norm = *v;
    if (auto v = history.integer("seed")) {
        if (*v < 0) throw ConfigurationError("[history] seed: must be >= 0");
        cfg.history.seed = static_cast<std::uint64_t>(*v);
    }
    if (auto v = history.raw("file")) cfg.history.file = *v;
    history.reject_unknown();

    Section output = section("output");
    if (auto v = output.raw("dir")) cfg.out_dir = *v;
    output.reject_unknown();

    resolve_config(cfg);
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigurationError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_config_string(ss.str());
    } catch (const Error& e) {
        rethrow_with_context(e, path);
    }
}

void resolve_config(RunConfig& cfg) {
    if (cfg.type == ProblemType::heat) {
        if (cfg.modes < 1) throw ConfigurationError("[problem] modes: must be >= 1");
        if (cfg.impulses < 1) throw ConfigurationError("[problem] impulses: must be >= 1");
        if (!(cfg.heat_delay > 0.0)) throw ConfigurationError("[problem] delay: must be > 0");
    } else {
        auto& s = cfg.spectral;
        if (s.eigenvalues.empty()) throw ConfigurationError("[problem] eigenvalues: empty list");
        if (!(s.omega > 0.0)) throw ConfigurationError("[problem] omega: must be > 0");
        if (!(s.delay > 0.0)) throw ConfigurationError("[problem] delay: must be > 0");
        if (s.impulse_values.size() != s.impulse_times.size()) {
            throw ConfigurationError("[problem] impulse_values: need one value per impulse time (" +
                                     std::to_string(s.impulse_times.size()) + ")");
        }
        for (std::size_t k = 0; k < s.impulse_times.size(); ++k) {
            const double t = s.impulse_times[k];
            if (!(t > 0.0 && t < s.omega) || (k > 0 && !(t > s.impulse_times[k - 1]))) {
                throw ConfigurationError(
                    "[problem] impulse_times: need 0 < t_1 < ... < t_p < omega");
            }
        }
        const double n = static_cast<double>(s.eigenvalues.size());
        if (!s.c0) s.c0 = std::abs(s.forcing_amplitude) * std::sqrt(n);
        if (!s.c1) s.c1 = std::abs(s.state_gain) + std::abs(s.sine_gain);
        if (!s.c2) s.c2 = std::abs(s.delay_gain);
        if (!s.impulse_lipschitz) {
            std::vector<double> a;
            for (double v : s.impulse_values) {
                a.push_back(s.impulse_type == ImpulseKind::constant ? 0.0 : std::abs(v));
            }
            s.impulse_lipschitz = a;
        }
        if (s.impulse_lipschitz->size() != s.impulse_times.size()) {
            throw ConfigurationError("[problem] impulse_lipschitz: need one value per impulse");
        }
    }

    const double omega = cfg.omega();
    const std::vector<double> times = impulse_times_of(cfg);
    if (cfg.step == 0.0) {
        cfg.step = TimeGrid::nearest(omega, times, 1e-3 * omega / kTwoPi).step;
    } else {
        try {
            cfg.step = TimeGrid::build(omega, times, cfg.step).step;
        } catch (const ConfigurationError& e) {
            throw ConfigurationError(std::string("[integrator] step: ") + e.what() + " (r = " +
                                     format_double(cfg.delay()) + ")");
        }
    }

    if (!(cfg.tol > 0.0)) throw ConfigurationError("[solver] tol: must be > 0");
    if (cfg.max_iter < 1) throw ConfigurationError("[solver] max_iter: must be >= 1");
    if (cfg.periods < 1) throw ConfigurationError("[solver] periods: must be >= 1");
    if (cfg.t_end == 0.0) {
        cfg.t_end = cfg.periods * omega;
    } else {
        auto node = grid_index(cfg.t_end, cfg.step);
        if (!node || *node < 1) {
            throw ConfigurationError("[solver] t_end = " + format_double(cfg.t_end) +
                                     " is not a multiple of the step h = " +
                                     format_double(cfg.step));
        }
        cfg.t_end = static_cast<double>(*node) * cfg.step;
    }
    if (!(cfg.history.norm >= 0.0)) throw ConfigurationError("[history] norm: must be >= 0");
    if (cfg.history.kind == HistoryKind::samples) {
        if (cfg.history.file.empty()) throw ConfigurationError("[history] file: required for kind = file");
        if (!std::filesystem::exists(cfg.history.file)) {
            throw ConfigurationError("[history] file: '" + cfg.history.file + "' does not exist");
        }
    }
    if (cfg.out_dir.empty()) throw ConfigurationError("[output] dir: must not be empty");
}

std::string emit_config(const RunConfig& cfg) {
    std::ostringstream os;
    auto num = [](double x) { return format_double(x); };
    os << "[problem]\n";
    os << "type = " << to_string(cfg.type) << '\n';
    if (cfg.type == ProblemType::heat) {
        os << "modes = " << cfg.modes << '\n';
        os << "impulses = " << cfg.impulses << '\n';
        os << "delay = " << num(cfg.heat_delay) << '\n';
        os << "forcing = " << (cfg.forcing ? "true" : "false") << '\n';
        os << "impulse_constant = " << to_string(cfg.impulse_constant) << '\n';
    } else {
        const auto& s = cfg.spectral;
        os << "eigenvalues = " << format_list(s.eigenvalues) << '\n';
        os << "omega = " << num(s.omega) << '\n';
        os << "delay = " << num(s.delay) << '\n';
        os << "growth_bound = " << num(s.growth_bound) << '\n';
        os << "state_gain = " << num(s.state_gain) << '\n';
        os << "delay_gain = " << num(s.delay_gain) << '\n';
        os << "sine_gain = " << num(s.sine_gain) << '\n';
        os << "forcing_amplitude = " << num(s.forcing_amplitude) << '\n';
        os << "impulse_times = " << format_list(s.impulse_times) << '\n';
        os << "impulse_type = " << to_string(s.impulse_type) << '\n';
        os << "impulse_values = " << format_list(s.impulse_values) << '\n';
        if (s.c0) os << "c0 = " << num(*s.c0) << '\n';
        if (s.c1) os << "c1 = " << num(*s.c1) << '\n';
        if (s.c2) os << "c2 = " << num(*s.c2) << '\n';
        if (s.impulse_lipschitz) os << "impulse_lipschitz = " << format_list(*s.impulse_lipschitz) << '\n';
    }
    os << "\n[integrator]\n";
    os << "step = " << num(cfg.step) << '\n';
    os << "scheme = " << to_string(cfg.scheme) << '\n';
    os << "\n[solver]\n";
    os << "tol = " << num(cfg.tol) << '\n';
    os << "max_iter = " << cfg.max_iter << '\n';
    os << "periods = " << cfg.periods << '\n';
    os << "t_end = " << num(cfg.t_end) << '\n';
    os << "samples = " << cfg.samples << '\n';
    os << "\n[history]\n";
    os << "kind = " << to_string(cfg.history.kind) << '\n';
    os << "value = " << num(cfg.history.value) << '\n';
    os << "norm = " << num(cfg.history.norm) << '\n';
    os << "seed = " << cfg.history.seed << '\n';
    if (!cfg.history.file.empty()) os << "file = " << cfg.history.file << '\n';
    os << "\n[output]\n";
    os << "dir = " << cfg.out_dir << '\n';
    return os.str();
}

}  // namespace impdelay
