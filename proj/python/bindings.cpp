#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "optomech/cli.hpp"
#include "optomech/config.hpp"
#include "optomech/errors.hpp"
#include "optomech/fock.hpp"
#include "optomech/langevin.hpp"
#include "optomech/params.hpp"
#include "optomech/spectra.hpp"
#include "optomech/steady.hpp"
#include "optomech/timedomain.hpp"

namespace py = pybind11;
using namespace optomech;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Linearized Langevin systems of standard and quadratic cavity optomechanics";
    m.attr("__version__") = OPTOMECH_VERSION;

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto validation = py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<PhysicsError>(m, "PhysicsError", base.ptr());
    (void)validation;

    py::enum_<DetuningReference>(m, "DetuningReference")
        .value("bare", DetuningReference::bare)
        .value("shifted", DetuningReference::shifted);
    py::enum_<CubicConvention>(m, "CubicConvention")
        .value("mean_field", CubicConvention::mean_field)
        .value("printed", CubicConvention::printed);
    py::enum_<QuadraticBranch>(m, "QuadraticBranch")
        .value("off_resonant", QuadraticBranch::off_resonant)
        .value("resonant", QuadraticBranch::resonant);
    py::enum_<PhononNoise>(m, "PhononNoise")
        .value("thermal", PhononNoise::thermal)
        .value("coherent", PhononNoise::coherent);
    py::enum_<NoiseOrdering>(m, "NoiseOrdering")
        .value("quantum", NoiseOrdering::quantum)
        .value("symmetrized", NoiseOrdering::symmetrized);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init<>())
        .def_readwrite("omega", &SystemParams::omega)
        .def_readwrite("Omega", &SystemParams::Omega)
        .def_readwrite("kappa", &SystemParams::kappa)
        .def_readwrite("Gamma", &SystemParams::Gamma)
        .def_readwrite("g0", &SystemParams::g0)
        .def_readwrite("g1", &SystemParams::g1)
        .def_readwrite("g2", &SystemParams::g2)
        .def_readwrite("g3", &SystemParams::g3)
        .def_readwrite("g4", &SystemParams::g4)
        .def_readwrite("alpha", &SystemParams::alpha)
        .def_readwrite("detuning", &SystemParams::detuning)
        .def_readwrite("detuning_reference", &SystemParams::detuning_reference)
        .def_readwrite("m_th", &SystemParams::m_th)
        .def_readwrite("x_zp", &SystemParams::x_zp)
        .def_readwrite("cavity_length", &SystemParams::cavity_length)
        .def("validate", &SystemParams::validate);

    py::class_<RateSet>(m, "RateSet")
        .def_readonly("g1", &RateSet::g1)
        .def_readonly("g2", &RateSet::g2)
        .def_readonly("g3", &RateSet::g3)
        .def_readonly("g4", &RateSet::g4)
        .def_readonly("beta_plus", &RateSet::beta_plus)
        .def_readonly("beta_minus", &RateSet::beta_minus);
    m.def("derive_rates", &derive_rates, py::arg("g0"), py::arg("omega"), py::arg("Omega"), py::arg("x_zp"),
          py::arg("cavity_length"));
    m.def("shifted_frequencies", &shifted_frequencies);

    py::class_<SteadyState>(m, "SteadyState")
        .def_readonly("n_bar", &SteadyState::n_bar)
        .def_readonly("m_bar", &SteadyState::m_bar)
        .def_readonly("a_bar", &SteadyState::a_bar)
        .def_readonly("b_bar", &SteadyState::b_bar)
        .def_readonly("d_bar", &SteadyState::d_bar)
        .def_readonly("f", &SteadyState::f)
        .def_readonly("psi", &SteadyState::psi)
        .def_readonly("all_real_roots", &SteadyState::all_real_roots)
        .def_readonly("bistable", &SteadyState::bistable)
        .def_readonly("residual", &SteadyState::residual)
        .def_readonly("regime", &SteadyState::regime);
    m.def("solve_cubic_steady", &solve_cubic_steady, py::arg("params"), py::arg("alpha"),
          py::arg("convention") = CubicConvention::mean_field);
    m.def("solve_quadratic_steady", &solve_quadratic_steady, py::arg("params"), py::arg("alpha"),
          py::arg("branch") = QuadraticBranch::off_resonant);
    m.def("mirror_displacement", &mirror_displacement);

    py::class_<LinearLangevinSystem>(m, "LinearLangevinSystem")
        .def_readonly("name", &LinearLangevinSystem::name)
        .def_readonly("basis", &LinearLangevinSystem::basis)
        .def_readonly("M", &LinearLangevinSystem::M)
        .def_readonly("gamma", &LinearLangevinSystem::gamma)
        .def_readonly("channels", &LinearLangevinSystem::channels)
        .def_readonly("input_map", &LinearLangevinSystem::input_map)
        .def_readonly("noise_psd_pos", &LinearLangevinSystem::noise_psd_pos)
        .def_readonly("noise_psd_neg", &LinearLangevinSystem::noise_psd_neg)
        .def_readonly("drive", &LinearLangevinSystem::drive)
        .def_readonly("warnings", &LinearLangevinSystem::warnings)
        .def_readonly("metadata", &LinearLangevinSystem::metadata)
        .def("dim", &LinearLangevinSystem::dim);
    m.def("system_kinds", &system_kinds);
    m.def("build_system", &build_system, py::arg("kind"), py::arg("params"),
          py::arg("convention") = CubicConvention::mean_field, py::arg("branch") = QuadraticBranch::off_resonant,
          py::arg("noise") = PhononNoise::thermal);

    m.def("scattering_matrix", &scattering_matrix, py::arg("system"), py::arg("w"), py::arg("rel_tol") = 1e-12);
    m.def(
        "output_psd",
        [](const LinearLangevinSystem& sys, const std::vector<double>& w, NoiseOrdering ord) {
            return output_psd(sys, w, ord).S_AA;
        },
        py::arg("system"), py::arg("w"), py::arg("ordering") = NoiseOrdering::quantum);
    m.def(
        "stability",
        [](const LinearLangevinSystem& sys) {
            const auto st = stability(sys);
            return py::make_tuple(st.eigenvalues, st.max_real, st.stable);
        },
        "Returns (eigenvalues, max_real, stable).");
    m.def("sideband_grid", &sideband_grid, py::arg("system"), py::arg("Omega"), py::arg("dense") = 10000,
          py::arg("coarse") = 2001);
    m.def(
        "sideband_analysis",
        [](const std::vector<double>& w, const std::vector<double>& s, double Omega, std::optional<double> kappa) {
            const auto r = sideband_analysis(w, s, Omega, kappa);
            return py::make_tuple(r.delta_r, r.delta_b, r.delta_Omega);
        },
        py::arg("w"), py::arg("S"), py::arg("Omega"), py::arg("kappa") = py::none(),
        "Returns (delta_r, delta_b, delta_Omega).");
    m.def(
        "estimate_inequivalence",
        [](const SystemParams& p, double n_bar) {
            const auto e = estimate_inequivalence(p, n_bar);
            return py::make_tuple(e.delta_Omega, e.normalized, e.warnings);
        },
        "Returns (delta_Omega, normalized, warnings).");

    m.def(
        "verify_basis_closure",
        [](const std::string& basis, int truncation, double tol, int margin) {
            const auto rep = fock::build_mode_ops(truncation, truncation);
            const auto r = fock::verify_basis_closure(rep, basis, tol, margin);
            return py::make_tuple(r.closed, r.max_residual);
        },
        py::arg("basis"), py::arg("truncation") = 14, py::arg("tol") = 1e-10, py::arg("margin") = 4,
        "Returns (closed, max_residual).");

    m.def(
        "integrate_semiclassical",
        [](const SystemParams& p, double T, double dt, std::uint64_t seed, bool noise) {
            SemiclassicalOptions o;
            o.T = T;
            o.dt = dt;
            o.seed = seed;
            o.noise = noise;
            const auto tr = integrate_semiclassical(p, o);
            py::dict out;
            out["t"] = tr.t;
            for (std::size_t i = 0; i < tr.labels.size(); ++i) out[py::str(tr.labels[i])] = tr.series[i];
            return out;
        },
        py::arg("params"), py::arg("T"), py::arg("dt"), py::arg("seed") = 1, py::arg("noise") = true);
    m.def(
        "welch_psd",
        [](const std::vector<cplx>& x, double dt, int seg, double overlap) {
            const auto r = welch_psd(x, dt, seg, overlap);
            return py::make_tuple(r.w, r.psd);
        },
        py::arg("series"), py::arg("dt"), py::arg("segment"), py::arg("overlap") = 0.5, "Returns (w, psd).");

    m.def(
        "parse_config",
        [](const std::string& text) {
            const auto c = parse_config(text);
            return py::make_tuple(c.params, c.run);
        },
        "Returns (SystemParams, run-section dict).");
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        "Runs the command-line tool in-process. Returns (exit_code, stdout, stderr).");
}
