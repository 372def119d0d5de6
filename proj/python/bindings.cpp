// Python veneer over the C++ core: model builders, action integrals, the
// stationary solver, packet approximants, the TDSE pipeline, and the gauged
// comparison tools.
#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tunnelwave/actions.hpp"
#include "tunnelwave/compare.hpp"
#include "tunnelwave/config.hpp"
#include "tunnelwave/density.hpp"
#include "tunnelwave/errors.hpp"
#include "tunnelwave/packets.hpp"
#include "tunnelwave/potential.hpp"
#include "tunnelwave/scattering.hpp"
#include "tunnelwave/tdse.hpp"

namespace py = pybind11;
using namespace tw;

namespace {

py::array_t<std::complex<double>> field_values(const WaveField& f) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(f.n));
    auto buf = out.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < buf.shape(0); ++i)
        buf(i) = f.values[static_cast<size_t>(i)];
    return out;
}

py::array_t<double> field_grid(const WaveField& f) {
    py::array_t<double> out(static_cast<py::ssize_t>(f.n));
    auto buf = out.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < buf.shape(0); ++i) buf(i) = f.x(static_cast<int>(i));
    return out;
}

Integrator parse_method(const std::string& name) {
    if (name == "numerov") return Integrator::numerov;
    if (name == "rk") return Integrator::rk;
    throw ConfigError("method must be \"numerov\" or \"rk\"");
}

} // namespace

PYBIND11_MODULE(_tunnelwave, m) {
    m.doc() = "semiclassical tunneling wave toolkit";
    m.def("version", [] { return std::string(version_string()); });

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<PotentialModel>(m, "PotentialModel")
        .def_readonly("v0", &PotentialModel::v0)
        .def_readonly("a", &PotentialModel::a)
        .def_readonly("barrier_top", &PotentialModel::barrier_top)
        .def("value", [](const PotentialModel& p, double x) { return p.value(x); })
        .def("__repr__", [](const PotentialModel& p) { return p.describe(); });
    m.def("make_eckart", &make_eckart, py::arg("v0") = 1.0, py::arg("a") = 1.0);
    m.def("make_gaussian_bump", &make_gaussian_bump, py::arg("v0"), py::arg("a"));
    m.def("make_rational", &make_rational, py::arg("v0"), py::arg("m"));

    py::class_<EnergyWindow>(m, "EnergyWindow")
        .def(py::init([](double e1, double e2) { return EnergyWindow{e1, e2}; }),
             py::arg("e1"), py::arg("e2"))
        .def_readwrite("e1", &EnergyWindow::e1)
        .def_readwrite("e2", &EnergyWindow::e2);

    py::class_<ValidityReport>(m, "ValidityReport")
        .def_readonly("decay_ok", &ValidityReport::decay_ok)
        .def_readonly("two_zeros_ok", &ValidityReport::two_zeros_ok)
        .def_readonly("simple_zeros_ok", &ValidityReport::simple_zeros_ok)
        .def_readonly("window_below_top", &ValidityReport::window_below_top)
        .def_readonly("asymptotics_below_window", &ValidityReport::asymptotics_below_window)
        .def_readonly("detail", &ValidityReport::detail)
        .def("all_ok", &ValidityReport::all_ok);
    m.def("verify_hypotheses", &verify_hypotheses, py::arg("model"), py::arg("window"),
          py::arg("strip_alpha") = 1.0);

    m.def("momentum", &momentum, py::arg("model"), py::arg("x"), py::arg("E"));
    m.def("k_plus", &k_plus, py::arg("model"), py::arg("E"));
    m.def("k_minus", &k_minus, py::arg("model"), py::arg("E"));
    m.def("agmon_action", &agmon_action, py::arg("model"), py::arg("E"));
    m.def(
        "turning_points",
        [](const PotentialModel& model, double E) {
            const TurningPoints tp = turning_points(model, E);
            return py::make_tuple(tp.x0, tp.x1);
        },
        py::arg("model"), py::arg("E"));

    py::class_<DensityParams>(m, "DensityParams")
        .def_readwrite("g", &DensityParams::g)
        .def_readwrite("e0", &DensityParams::e0)
        .def_readwrite("g_cubic", &DensityParams::g_cubic)
        .def_readwrite("window", &DensityParams::window)
        .def_readwrite("hermite_j", &DensityParams::hermite_j)
        .def_readwrite("hermite_eta", &DensityParams::hermite_eta);
    m.def("make_canonical_density", &make_canonical_density);
    m.def("hermite_density", &hermite_density, py::arg("j"), py::arg("eta"), py::arg("model"),
          py::arg("window"));

    py::class_<ActionProfile>(m, "ActionProfile")
        .def(py::init([](const PotentialModel& model, const EnergyWindow& window,
                         const DensityParams& params, int nodes) {
                 return ActionProfile(model, window, params.to_gj(), nodes, 1);
             }),
             py::arg("model"), py::arg("window"), py::arg("density"), py::arg("nodes") = 64)
        .def("K", &ActionProfile::K, py::arg("E"))
        .def("alpha", &ActionProfile::alpha, py::arg("E"))
        .def("kappa", &ActionProfile::kappa, py::arg("E"))
        .def("omega", &ActionProfile::omega, py::arg("E"))
        .def("rho", &ActionProfile::rho, py::arg("E"));

    py::class_<SaddleData>(m, "SaddleData")
        .def_readonly("e_star", &SaddleData::e_star)
        .def_readonly("alpha_star", &SaddleData::alpha_star)
        .def_readonly("alpha_pp", &SaddleData::alpha_pp)
        .def_readonly("k_star", &SaddleData::k_star);
    m.def("find_e_star", &find_e_star, py::arg("profile"), py::arg("density"));

    py::class_<ScatteringSolution>(m, "ScatteringSolution")
        .def_readonly("t_amp", &ScatteringSolution::t_amp)
        .def_readonly("r_amp", &ScatteringSolution::r_amp)
        .def_readonly("x0", &ScatteringSolution::x0)
        .def_readonly("x1", &ScatteringSolution::x1);
    m.def(
        "solve_stationary",
        [](const PotentialModel& model, double E, double hbar, const std::string& method) {
            return solve_stationary(model, E, hbar, {}, parse_method(method));
        },
        py::arg("model"), py::arg("E"), py::arg("hbar"), py::arg("method") = "numerov");
    m.def("connection_defect", &connection_defect, py::arg("model"), py::arg("E"),
          py::arg("hbar"));

    py::class_<TrajectoryPoint>(m, "TrajectoryPoint")
        .def_readonly("t", &TrajectoryPoint::t)
        .def_readonly("q", &TrajectoryPoint::q)
        .def_readonly("qdot", &TrajectoryPoint::qdot);
    m.def("classical_trajectory", &classical_trajectory, py::arg("model"), py::arg("saddle"),
          py::arg("density"), py::arg("t"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double x_min, double dx, int n) { return GridSpec{x_min, dx, n}; }),
             py::arg("x_min"), py::arg("dx"), py::arg("n"))
        .def_readwrite("x_min", &GridSpec::x_min)
        .def_readwrite("dx", &GridSpec::dx)
        .def_readwrite("n", &GridSpec::n);

    py::class_<WaveField>(m, "WaveField")
        .def_readonly("x_min", &WaveField::x_min)
        .def_readonly("dx", &WaveField::dx)
        .def_readonly("n", &WaveField::n)
        .def_readonly("t", &WaveField::t)
        .def_readonly("hbar", &WaveField::hbar)
        .def_readonly("meta", &WaveField::meta)
        .def_property_readonly("values", &field_values)
        .def_property_readonly("x", &field_grid)
        .def("norm", &WaveField::norm)
        .def("peak_abs", &WaveField::peak_abs);

    m.def("chi_gauss", &chi_gauss, py::arg("model"), py::arg("saddle"), py::arg("density"),
          py::arg("grid"), py::arg("t"), py::arg("hbar"));
    m.def("chi_mod", &chi_mod, py::arg("model"), py::arg("saddle"), py::arg("density"),
          py::arg("grid"), py::arg("t"), py::arg("hbar"), py::arg("C") = 10.0,
          py::arg("beta") = 0.25);
    m.def("chi_gauss_infinity", &chi_gauss_infinity, py::arg("saddle"), py::arg("profile"),
          py::arg("density"), py::arg("grid"), py::arg("t"), py::arg("hbar"));
    m.def("chi_gauss_infinity_norm", &chi_gauss_infinity_norm, py::arg("saddle"),
          py::arg("profile"), py::arg("density"), py::arg("hbar"));
    m.def("chi_superposition", &chi_superposition, py::arg("model"), py::arg("profile"),
          py::arg("density"), py::arg("saddle"), py::arg("grid"), py::arg("t"),
          py::arg("hbar"));

    py::class_<MomentumStats>(m, "MomentumStats")
        .def_readonly("mean_k", &MomentumStats::mean_k)
        .def_readonly("var_k", &MomentumStats::var_k)
        .def_readonly("gauss_fit_residual", &MomentumStats::gauss_fit_residual);
    m.def("momentum_stats", &momentum_stats, py::arg("field"));

    py::class_<SimulationConfig>(m, "SimulationConfig")
        .def(py::init<>())
        .def_readwrite("L", &SimulationConfig::L)
        .def_readwrite("n", &SimulationConfig::n)
        .def_readwrite("dt", &SimulationConfig::dt)
        .def_readwrite("t_final", &SimulationConfig::t_final)
        .def_readwrite("hbar", &SimulationConfig::hbar)
        .def_readwrite("x_c", &SimulationConfig::x_c)
        .def_readwrite("window", &SimulationConfig::window)
        .def_readwrite("absorber", &SimulationConfig::absorber)
        .def_readwrite("snapshot_times", &SimulationConfig::snapshot_times)
        .def_readwrite("placement_tol", &SimulationConfig::placement_tol)
        .def_readwrite("buffer_tol", &SimulationConfig::buffer_tol)
        .def_readwrite("norm_check_stride", &SimulationConfig::norm_check_stride);

    py::class_<EvolutionTrace>(m, "EvolutionTrace")
        .def_readonly("snapshots", &EvolutionTrace::snapshots)
        .def_readonly("norm_history", &EvolutionTrace::norm_history)
        .def_readonly("transmitted_history", &EvolutionTrace::transmitted_history)
        .def_readonly("dt", &EvolutionTrace::dt)
        .def_readonly("steps", &EvolutionTrace::steps)
        .def_readonly("t0", &EvolutionTrace::t0)
        .def_readonly("transmitted_cut", &EvolutionTrace::transmitted_cut);

    m.def("synthesize_initial", &synthesize_initial, py::arg("model"), py::arg("density"),
          py::arg("hbar"), py::arg("config"));
    m.def("evolve", &evolve, py::arg("model"), py::arg("initial"), py::arg("config"));
    m.def("extract_transmitted", &extract_transmitted, py::arg("trace"), py::arg("model"),
          py::arg("window"), py::arg("buffer_tol") = 1e-8);

    py::class_<GaugeResult>(m, "GaugeResult")
        .def_readonly("raw_err", &GaugeResult::raw_err)
        .def_readonly("gauged_err", &GaugeResult::gauged_err)
        .def_readonly("phase_offset", &GaugeResult::phase_offset)
        .def_readonly("time_offset", &GaugeResult::time_offset);
    m.def("l2_compare", &l2_compare, py::arg("ref"), py::arg("approx"), py::arg("fit_gauge"),
          py::arg("time_search_halfwidth") = 4.0);
    m.def("resample_to", &resample_to, py::arg("src"), py::arg("target"));

    py::class_<ScalingFit>(m, "ScalingFit")
        .def_readonly("slope", &ScalingFit::slope)
        .def_readonly("intercept", &ScalingFit::intercept)
        .def_readonly("r2", &ScalingFit::r2);
    m.def("scaling_study", &scaling_study, py::arg("hbar_err"));
}
