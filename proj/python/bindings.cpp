#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "impdelay/analysis.hpp"
#include "impdelay/cli.hpp"
#include "impdelay/heat.hpp"
#include "impdelay/mild_solver.hpp"
#include "impdelay/periodic.hpp"

namespace py = pybind11;
using namespace impdelay;

namespace {

Eigen::VectorXd trajectory_times(const Trajectory& t) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(t.size()));
    for (long j = t.first_node(); j <= t.last_node(); ++j) out[j - t.first_node()] = t.time(j);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Impulsive delay evolution equations: integration, periodic solutions, certificates";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
    py::register_exception<ConfigurationError>(m, "ConfigurationError", base.ptr());
    py::register_exception<NotExponentiallyStable>(m, "NotExponentiallyStable", base.ptr());
    py::register_exception<UnsupportedConfiguration>(m, "UnsupportedConfiguration", base.ptr());
    py::register_exception<NumericFailure>(m, "NumericFailure", base.ptr());
    py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
    py::register_exception<InternalConsistencyError>(m, "InternalConsistencyError", base.ptr());

    py::enum_<Scheme>(m, "Scheme").value("etd1", Scheme::etd1).value("etd2", Scheme::etd2);
    py::enum_<Side>(m, "Side").value("left", Side::left).value("right", Side::right);

    py::class_<SpectralOperator>(m, "SpectralOperator")
        .def(py::init<std::vector<double>, double>(), py::arg("eigenvalues"), py::arg("growth_bound") = 1.0)
        .def_static("dirichlet_laplacian", &SpectralOperator::dirichlet_laplacian, py::arg("n_modes"))
        .def_property_readonly("eigenvalues", &SpectralOperator::eigenvalues)
        .def_property_readonly("dimension", &SpectralOperator::dimension)
        .def_property_readonly("growth_bound", &SpectralOperator::growth_bound)
        .def("exponentially_stable", &SpectralOperator::exponentially_stable);

    m.def("semigroup_apply", &semigroup_apply, py::arg("op"), py::arg("t"), py::arg("v"));
    m.def("growth_exponent", &growth_exponent, py::arg("op"));
    m.def("inv_I_minus_T_omega", &inv_I_minus_T_omega, py::arg("op"), py::arg("omega"), py::arg("v"));

    py::class_<IntegratorConfig>(m, "IntegratorConfig")
        .def(py::init<>())
        .def_readwrite("grid_step", &IntegratorConfig::grid_step)
        .def_readwrite("scheme", &IntegratorConfig::scheme);

    py::class_<HistorySegment>(m, "HistorySegment")
        .def_static("constant", &HistorySegment::constant, py::arg("delay"), py::arg("h"), py::arg("value"))
        .def_static("sample", &HistorySegment::sample, py::arg("delay"), py::arg("h"), py::arg("dimension"),
                    py::arg("f"))
        .def_property_readonly("delay", &HistorySegment::delay)
        .def_property_readonly("offsets", [](const HistorySegment& h) {
            return std::vector<double>(h.offsets().begin(), h.offsets().end());
        })
        .def_property_readonly("values", &HistorySegment::values)
        .def("value_at", &HistorySegment::value_at, py::arg("s"), py::arg("side") = Side::left)
        .def("sup_norm", &HistorySegment::sup_norm);
    m.def("random_history", &random_history, py::arg("delay"), py::arg("h"), py::arg("dimension"),
          py::arg("norm"), py::arg("seed"));

    py::class_<Trajectory>(m, "Trajectory")
        .def_property_readonly("times", &trajectory_times)
        .def_property_readonly("samples", &Trajectory::samples)
        .def_property_readonly("grid_step", &Trajectory::grid_step)
        .def_property_readonly("jump_times", [](const Trajectory& t) {
            std::vector<double> out;
            for (const auto& j : t.jumps()) out.push_back(j.time);
            return out;
        })
        .def("value_at", &Trajectory::value_at, py::arg("t"), py::arg("side") = Side::left)
        .def("pc_norm", &Trajectory::pc_norm);

    py::class_<PeriodicSolution>(m, "PeriodicSolution")
        .def_readonly("one_period", &PeriodicSolution::one_period)
        .def_readonly("period", &PeriodicSolution::period)
        .def_readonly("residual", &PeriodicSolution::residual)
        .def_readonly("iterations_used", &PeriodicSolution::iterations_used)
        .def_readonly("contraction_estimate", &PeriodicSolution::contraction_estimate)
        .def_readonly("measured_ratio", &PeriodicSolution::measured_ratio)
        .def_readonly("ratios", &PeriodicSolution::ratios)
        .def_readonly("contraction_verified", &PeriodicSolution::contraction_verified)
        .def("value_at", &PeriodicSolution::value_at, py::arg("t"), py::arg("side") = Side::left);

    m.def(
        "linear_periodic",
        [](const SpectralOperator& op, double omega, const std::function<StateVector(double)>& forcing,
           const std::vector<double>& times, const std::vector<StateVector>& values, const IntegratorConfig& cfg) {
            return linear_periodic(op, omega, forcing, times, values, cfg);
        },
        py::arg("op"), py::arg("omega"), py::arg("forcing"), py::arg("impulse_times") = std::vector<double>{},
        py::arg("impulse_values") = std::vector<StateVector>{}, py::arg("cfg") = IntegratorConfig{});

    py::class_<ProblemSpec>(m, "ProblemSpec")
        .def_property_readonly("dimension", &ProblemSpec::dimension)
        .def_readonly("delay_r", &ProblemSpec::delay_r)
        .def_readonly("period_omega", &ProblemSpec::period_omega)
        .def_property_readonly("impulse_times", [](const ProblemSpec& p) { return p.impulses.times(); });

    m.def("integrate_ivp", &integrate_ivp, py::arg("problem"), py::arg("phi"), py::arg("t_end"), py::arg("cfg"));
    m.def(
        "picard_periodic",
        [](const ProblemSpec& p, double tol, int max_iter, const IntegratorConfig& cfg) {
            return picard_periodic(p, nullptr, PicardOptions{tol, max_iter}, cfg);
        },
        py::arg("problem"), py::arg("tol") = 1e-8, py::arg("max_iter") = 200, py::arg("cfg") = IntegratorConfig{});

    py::class_<HypothesisReport>(m, "HypothesisReport")
        .def_readonly("M", &HypothesisReport::M)
        .def_readonly("nu0", &HypothesisReport::nu0)
        .def_readonly("c0", &HypothesisReport::c0)
        .def_readonly("c1", &HypothesisReport::c1)
        .def_readonly("c2", &HypothesisReport::c2)
        .def_readonly("a", &HypothesisReport::a)
        .def_readonly("H3_margin", &HypothesisReport::H3_margin)
        .def_readonly("H3prime_margin", &HypothesisReport::H3prime_margin)
        .def_readonly("kappa", &HypothesisReport::kappa)
        .def_readonly("kappa_sup", &HypothesisReport::kappa_sup)
        .def_readonly("sigma", &HypothesisReport::sigma)
        .def_readonly("constants_verified", &HypothesisReport::constants_verified)
        .def_readonly("violation_count", &HypothesisReport::violation_count);
    m.def("report_from_constants", &report_from_constants, py::arg("M"), py::arg("nu0"), py::arg("omega"),
          py::arg("delay_r"), py::arg("c0"), py::arg("c1"), py::arg("c2"), py::arg("a"),
          py::arg("impulse_times") = std::vector<double>{});
    m.def(
        "build_report",
        [](const ProblemSpec& p, double M, std::size_t samples, std::uint64_t seed) {
            SpotCheckOptions o;
            o.samples = samples;
            o.seed = seed;
            return build_report(p, M, o);
        },
        py::arg("problem"), py::arg("M") = 1.0, py::arg("samples") = 1000, py::arg("seed") = 0);
    m.def("gronwall_bound", &gronwall_bound, py::arg("phi_norm"), py::arg("alpha1"), py::arg("alpha2"),
          py::arg("beta"), py::arg("t"));

    py::class_<DecayRecord>(m, "DecayRecord")
        .def_readonly("applicable", &DecayRecord::applicable)
        .def_readonly("sigma", &DecayRecord::sigma)
        .def_readonly("c_phi", &DecayRecord::c_phi)
        .def_readonly("times", &DecayRecord::times)
        .def_readonly("errors", &DecayRecord::errors)
        .def_readonly("envelope", &DecayRecord::envelope)
        .def_readonly("violations", &DecayRecord::violations)
        .def_readonly("fitted_rate", &DecayRecord::fitted_rate)
        .def("bound_holds", &DecayRecord::bound_holds);
    m.def("decay_experiment", &decay_experiment, py::arg("problem"), py::arg("ustar"), py::arg("phi"),
          py::arg("n_periods"), py::arg("cfg"));

    py::enum_<ImpulseConstant>(m, "ImpulseConstant")
        .value("nominal", ImpulseConstant::nominal)
        .value("conservative", ImpulseConstant::conservative);
    py::class_<HeatConfig>(m, "HeatConfig")
        .def(py::init<>())
        .def_readwrite("n_modes", &HeatConfig::n_modes)
        .def_readwrite("impulse_count", &HeatConfig::impulse_count)
        .def_readwrite("delay_r", &HeatConfig::delay_r)
        .def_readwrite("grid_step", &HeatConfig::grid_step)
        .def_readwrite("forcing", &HeatConfig::forcing)
        .def_readwrite("impulse_constant", &HeatConfig::impulse_constant)
        .def_readwrite("history_norm", &HeatConfig::history_norm)
        .def_readwrite("seed", &HeatConfig::seed)
        .def_readwrite("periods", &HeatConfig::periods)
        .def_readwrite("tol", &HeatConfig::tol)
        .def_readwrite("max_iter", &HeatConfig::max_iter)
        .def_readwrite("spot_samples", &HeatConfig::spot_samples);
    m.def("build_heat_problem", &build_heat_problem, py::arg("cfg"));
    m.def("heat_integrator", &heat_integrator, py::arg("cfg"));
    m.def("heat_to_physical", &heat_to_physical, py::arg("coefficients"));
    m.def("heat_to_spectral", &heat_to_spectral, py::arg("values"));

    py::class_<HeatPipelineReport>(m, "HeatPipelineReport")
        .def_readonly("hypotheses", &HeatPipelineReport::hypotheses)
        .def_readonly("periodic", &HeatPipelineReport::periodic)
        .def_readonly("poincare_gap", &HeatPipelineReport::poincare_gap)
        .def_readonly("decay", &HeatPipelineReport::decay)
        .def_property_readonly("stability", [](const HeatPipelineReport& r) { return to_string(r.stability); });
    m.def("run_heat_pipeline", &run_heat_pipeline, py::arg("cfg"), py::call_guard<py::gil_scoped_release>());

    m.def("emit_config", [](const std::string& text) { return emit_config(parse_config_string(text)); },
          py::arg("text"), "Parse INI text and return the resolved configuration.");
    m.def(
        "run",
        [](const std::string& text, const std::string& subcommand, const std::string& out_dir) {
            RunConfig cfg = parse_config_string(text);
            cfg.out_dir = out_dir;
            std::ostringstream diag;
            const int code = static_cast<int>(run(cfg, parse_subcommand(subcommand), diag));
            return py::make_tuple(code, diag.str());
        },
        py::arg("config_text"), py::arg("subcommand"), py::arg("out_dir"),
        "Run a subcommand on INI text; returns (exit_code, diagnostics).");
}
