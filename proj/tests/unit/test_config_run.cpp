#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "impdelay/cli.hpp"
#include "impdelay/errors.hpp"

using namespace impdelay;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(IMPDELAY_TEST_DATA) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("impdelay_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string error_of(const std::string& text) {
    try {
        parse_config_string(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* kScalarFull = R"(
[problem]
type = spectral
eigenvalues = 1, 4, 9
omega = 3
delay = 0.25
growth_bound = 1
state_gain = 0.1
delay_gain = 0.2
sine_gain = 0.05
forcing_amplitude = 0.7
impulse_times = 1, 2
impulse_type = sine
impulse_values = 0.1, 0.2
[integrator]
step = 0.01
scheme = etd1
[solver]
tol = 1e-9
max_iter = 50
periods = 4
samples = 20
[history]
kind = random
norm = 0.5
seed = 17
[output]
dir = out
)";

}  // namespace

TEST(ParseConfig, MinimalHeatConfigGetsDefaults) {
    const auto cfg = parse_config_string("[problem]\ntype = heat\nimpulses = 2\ndelay = 0.1\n");
    EXPECT_EQ(cfg.type, ProblemType::heat);
    EXPECT_EQ(cfg.modes, 16);
    EXPECT_DOUBLE_EQ(cfg.omega(), 2.0 * M_PI);
    EXPECT_EQ(cfg.scheme, Scheme::etd2);
    EXPECT_EQ(cfg.tol, 1e-8);
    EXPECT_EQ(cfg.max_iter, 200);
    EXPECT_LE(cfg.step, 1e-3);
    EXPECT_GT(cfg.step, 0.999e-3);
    EXPECT_EQ(cfg.history.kind, HistoryKind::random);
    EXPECT_EQ(cfg.history.seed, 0u);
    EXPECT_NEAR(cfg.t_end, 10.0 * 2.0 * M_PI, 1e-12);
}

TEST(ParseConfig, UnknownKeyNamesKeyAndSection) {
    const std::string msg = error_of("[problem]\ntype = heat\nmodez = 4\n");
    EXPECT_NE(msg.find("unknown key 'modez' in section [problem]"), std::string::npos) << msg;
    EXPECT_NE(error_of("[nonsense]\nx = 1\n"), "");
    EXPECT_NE(error_of("x = 1\n"), "");
}

TEST(ParseConfig, IncommensurateStepIsAConfigurationError) {
    EXPECT_THROW(parse_config_string("[problem]\nomega = 1\n[integrator]\nstep = 0.3\n"), ConfigurationError);
    const std::string msg = error_of("[problem]\nomega = 1\nimpulse_times = 0.25\nimpulse_values = 1\n"
                                     "[integrator]\nstep = 0.1\n");
    EXPECT_NE(msg.find("impulse"), std::string::npos) << msg;
    EXPECT_THROW(parse_config_string("[problem]\neigenvalues = 1, x\n"), ConfigurationError);
    EXPECT_THROW(parse_config(data("does_not_exist.ini")), ConfigurationError);
}

TEST(ParseConfig, EmitRoundTripsIdentically) {
    const auto cfg = parse_config_string(kScalarFull);
    const std::string once = emit_config(cfg);
    const std::string twice = emit_config(parse_config_string(once));
    EXPECT_EQ(once, twice);
    const auto back = parse_config_string(once);
    EXPECT_EQ(back.spectral.eigenvalues, cfg.spectral.eigenvalues);
    EXPECT_EQ(back.spectral.impulse_values, cfg.spectral.impulse_values);
    EXPECT_EQ(back.spectral.impulse_type, ImpulseKind::sine);
    EXPECT_EQ(back.step, cfg.step);
    EXPECT_EQ(back.history.seed, 17u);
    EXPECT_DOUBLE_EQ(*back.spectral.c1, 0.15);
}

TEST(Run, VerifyOnHeatDefaults) {
    auto cfg = parse_config(data("heat_default.ini"));
    cfg.out_dir = scratch("verify").string();
    std::ostringstream diag;
    EXPECT_EQ(run(cfg, Subcommand::verify, diag), ExitCode::ok) << diag.str();
    const std::string report = slurp(fs::path(cfg.out_dir) / "report.txt");
    EXPECT_NE(report.find("H3_holds = true"), std::string::npos);
    EXPECT_NE(report.find("H3prime_holds = true"), std::string::npos);
    EXPECT_TRUE(fs::exists(fs::path(cfg.out_dir) / "resolved_config.ini"));
}

TEST(Run, PeriodicScalarSineStartsAtOneHalf) {
    auto cfg = parse_config(data("scalar_sin.ini"));
    cfg.out_dir = scratch("periodic").string();
    std::ostringstream diag;
    ASSERT_EQ(run(cfg, Subcommand::periodic, diag), ExitCode::ok) << diag.str();
    std::ifstream in(fs::path(cfg.out_dir) / "periodic.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(header.rfind("t,norm,", 0), 0u);
    std::istringstream fields(row);
    std::string t, norm;
    std::getline(fields, t, ',');
    std::getline(fields, norm, ',');
    EXPECT_EQ(std::stod(t), 0.0);
    EXPECT_NEAR(std::stod(norm), 0.5, 1e-6);
}

TEST(Run, StabilityWithLongDelayIsInapplicable) {
    auto cfg = parse_config(data("heat_long_delay.ini"));
    cfg.modes = 4;
    resolve_config(cfg);
    cfg.out_dir = scratch("long_delay").string();
    std::ostringstream diag;
    EXPECT_EQ(run(cfg, Subcommand::stability, diag), ExitCode::certificate_inapplicable) << diag.str();
}

TEST(Run, SeededRunsAreByteIdentical) {
    auto cfg = parse_config_string(kScalarFull);
    std::ostringstream diag;
    cfg.out_dir = scratch("det_a").string();
    ASSERT_EQ(run(cfg, Subcommand::stability, diag), ExitCode::ok) << diag.str();
    cfg.out_dir = scratch("det_b").string();
    ASSERT_EQ(run(cfg, Subcommand::stability, diag), ExitCode::ok) << diag.str();
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(fs::temp_directory_path() / "impdelay_test_det_a")) {
        const fs::path other = fs::temp_directory_path() / "impdelay_test_det_b" / entry.path().filename();
        ASSERT_TRUE(fs::exists(other)) << other;
        if (entry.path().filename() == "resolved_config.ini") continue;  // names its own directory
        EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
        ++compared;
    }
    EXPECT_GE(compared, 2u);  // report.txt and decay.csv
}

TEST(Run, ExitCodeMapping) {
    EXPECT_EQ(exit_code_for(ErrorKind::invalid_input), ExitCode::configuration_error);
    EXPECT_EQ(exit_code_for(ErrorKind::configuration), ExitCode::configuration_error);
    EXPECT_EQ(exit_code_for(ErrorKind::non_convergence), ExitCode::non_convergence);
    EXPECT_EQ(exit_code_for(ErrorKind::numeric_failure), ExitCode::numeric_failure);
    EXPECT_EQ(exit_code_for(ErrorKind::internal_consistency), ExitCode::internal_error);

    auto cfg = parse_config(data("scalar_sin.ini"));
    cfg.max_iter = 1;
    cfg.out_dir = scratch("nonconv").string();
    std::ostringstream diag;
    EXPECT_EQ(run(cfg, Subcommand::periodic, diag), ExitCode::non_convergence);
    EXPECT_FALSE(diag.str().empty());
    EXPECT_EQ(parse_subcommand("heat"), Subcommand::heat);
    EXPECT_THROW(parse_subcommand("plot"), ConfigurationError);
}
