#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mktphase/config.hpp"
#include "mktphase/error.hpp"
#include "mktphase/indices.hpp"
#include "mktphase/phase.hpp"
#include "mktphase/pipeline.hpp"
#include "mktphase/scaling.hpp"
#include "mktphase/spectral.hpp"
#include "mktphase/svm.hpp"

namespace py = pybind11;
using namespace mktphase;

namespace {

SvmParams make_svm(const Eigen::VectorXd& beta0, double gamma_m, const Eigen::VectorXd& gamma, std::uint64_t seed) {
    SvmParams p;
    p.beta0 = beta0;
    p.gamma_m = gamma_m;
    p.gamma = gamma;
    p.seed = seed;
    validate(p);
    return p;
}

}  // namespace

PYBIND11_MODULE(_mktphase, m) {
    m.doc() = "Market-mode spectral analysis";
    m.attr("__version__") = MKTPHASE_VERSION;

    // Raw handle kept alive for the interpreter lifetime; instances carry a
    // `category` attribute matching the CLI error prefix.
    static PyObject* error_type = PyErr_NewException("mktphase.Error", PyExc_RuntimeError, nullptr);
    m.add_object("Error", py::handle(error_type));
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(
                std::string(category_name(e.category())) + ": " + e.what());
            exc.attr("category") = std::string(category_name(e.category()));
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<Eigensystem>(m, "Eigensystem")
        .def_readonly("values", &Eigensystem::values)
        .def_readonly("vectors", &Eigensystem::vectors)
        .def_readonly("sweeps", &Eigensystem::sweeps);
    m.def("eigensystem", [](const Eigen::MatrixXd& a) { return eigensystem(a); }, py::arg("matrix"),
          "Descending eigenvalues and sign-fixed eigenvectors (columns).");

    py::class_<WindowSpec>(m, "WindowSpec")
        .def(py::init<std::ptrdiff_t, std::ptrdiff_t, std::ptrdiff_t>(), py::arg("center"), py::arg("width"),
             py::arg("step"))
        .def_readwrite("center", &WindowSpec::center)
        .def_readwrite("width", &WindowSpec::width)
        .def_readwrite("step", &WindowSpec::step)
        .def_property_readonly("first", &WindowSpec::first)
        .def_property_readonly("end", &WindowSpec::end);
    m.def("window_grid", &window_grid, py::arg("n_obs"), py::arg("width"), py::arg("step"));

    py::class_<SpectralWindow>(m, "SpectralWindow")
        .def_readonly("spec", &SpectralWindow::spec)
        .def_readonly("cov", &SpectralWindow::cov)
        .def_readonly("eigenvalues", &SpectralWindow::eigenvalues)
        .def_readonly("eigenvectors", &SpectralWindow::eigenvectors)
        .def_readonly("betas", &SpectralWindow::betas)
        .def_readonly("beta_bar", &SpectralWindow::beta_bar)
        .def_property_readonly("lambda0", &SpectralWindow::lambda0);
    m.def("analyze_window", [](const Eigen::MatrixXd& r, const WindowSpec& s) { return analyze_window(r, s); },
          py::arg("returns"), py::arg("spec"), "Returns are firms x days.");
    m.def("delta_bound", &delta_bound, py::arg("window"));
    m.def("mode_overlaps", &mode_overlaps, py::arg("window"));

    py::class_<AverageCorrelation>(m, "AverageCorrelation")
        .def_readonly("direct", &AverageCorrelation::direct)
        .def_readonly("identity", &AverageCorrelation::identity);
    py::class_<WindowDiagnostics>(m, "WindowDiagnostics")
        .def_readonly("lambda0", &WindowDiagnostics::lambda0)
        .def_readonly("trace", &WindowDiagnostics::trace)
        .def_readonly("beta_bar", &WindowDiagnostics::beta_bar)
        .def_readonly("market_var", &WindowDiagnostics::market_var)
        .def_readonly("delta_sq", &WindowDiagnostics::delta_sq)
        .def_readonly("bound", &WindowDiagnostics::bound)
        .def_readonly("c_av", &WindowDiagnostics::c_av)
        .def("bound_holds", &WindowDiagnostics::bound_holds, py::arg("slack") = 1e-10);
    m.def("diagnose_window", &diagnose_window, py::arg("returns"), py::arg("window"));

    m.def("ideal_covariance",
          [](const Eigen::VectorXd& b, double gm, const Eigen::VectorXd& g) { return ideal_covariance(make_svm(b, gm, g, 0)); },
          py::arg("beta0"), py::arg("gamma_m"), py::arg("gamma"));
    m.def("sample_returns",
          [](const Eigen::VectorXd& b, double gm, const Eigen::VectorXd& g, std::size_t n_days, std::uint64_t seed) {
              return sample_returns(make_svm(b, gm, g, seed), n_days);
          },
          py::arg("beta0"), py::arg("gamma_m"), py::arg("gamma"), py::arg("n_days"), py::arg("seed"));
    m.def("oracle_leading",
          [](const Eigen::VectorXd& b, double gm, const Eigen::VectorXd& g) {
              const auto o = oracle_leading(make_svm(b, gm, g, 0));
              return py::make_tuple(o.lambda0, o.betas);
          },
          py::arg("beta0"), py::arg("gamma_m"), py::arg("gamma"), "(lambda0, betas) to second order in 1/(gamma_m^2 N).");
    m.def("normalize_beta0", &normalize_beta0, py::arg("beta0"));

    m.def("sector_risk",
          [](const Eigen::VectorXd& b, const Eigen::VectorXd& v, const std::vector<std::size_t>& s, std::size_t n,
             double gate) { return sector_risk(b, v, s, n, gate); },
          py::arg("betas"), py::arg("volumes"), py::arg("sectors"), py::arg("n_sectors"), py::arg("gate") = 1.0);
    m.def("order_parameters", &order_parameters, py::arg("risk"));
    m.def("kirman_order_parameter", &kirman_order_parameter, py::arg("theta"));

    py::class_<PowerLawFit>(m, "PowerLawFit")
        .def_readonly("exponent", &PowerLawFit::exponent)
        .def_readonly("intercept", &PowerLawFit::intercept)
        .def_readonly("max_residual", &PowerLawFit::max_residual);
    m.def("fit_power_law",
          [](const std::vector<double>& x, const std::vector<double>& y) { return fit_power_law(x, y); },
          py::arg("x"), py::arg("y"));

    m.def("run",
          [](const std::string& command, const std::map<std::string, std::string>& settings) {
              const auto cfg = make_config(settings);
              if (command == "synth") run_synth(cfg);
              else if (command == "ingest") run_ingest(cfg);
              else if (command == "analyze") return run_analyze(cfg).all_bounds_hold;
              else if (command == "scaling") run_scaling(cfg);
              else if (command == "phase") run_phase(cfg);
              else throw Error(ErrorCategory::config, "unknown command '" + command + "'");
              return true;
          },
          py::arg("command"), py::arg("settings"),
          "Runs one pipeline command with key/value settings; False when analyze finds a bound violation.");
}
