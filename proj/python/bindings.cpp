#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qsf/applications.hpp"
#include "qsf/circuit.hpp"
#include "qsf/cli.hpp"
#include "qsf/coefficients.hpp"
#include "qsf/errors.hpp"
#include "qsf/experiments.hpp"
#include "qsf/sampler.hpp"
#include "qsf/states.hpp"

namespace py = pybind11;
using namespace qsf;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexMatrix to_matrix(const ComplexArray& a) {
    if (a.ndim() != 2) throw ArgumentError("expected a 2-d array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    std::vector<Complex> data(a.data(), a.data() + rows * cols);
    return ComplexMatrix(rows, cols, std::move(data));
}

ComplexArray to_array(const ComplexMatrix& m) {
    ComplexArray out({m.rows(), m.cols()});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) view(r, c) = m(r, c);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Classical simulation of quantum state function estimators";

    auto base = py::register_exception<Error>(m, "QsfError");
    py::register_exception<ArgumentError>(m, "ArgumentError", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
    py::register_exception<ApproximationError>(m, "ApproximationError", base.ptr());
    py::register_exception<SearchError>(m, "SearchError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::enum_<Mode>(m, "Mode").value("standard", Mode::standard).value("variant", Mode::variant);

    py::class_<PolySpec>(m, "PolySpec")
        .def(py::init([](const std::map<int, double>& alphas, double const_term, Mode mode) {
                 return PolySpec::make(alphas, const_term, mode);
             }),
             py::arg("alphas"), py::arg("const_term") = 0.0, py::arg("mode") = Mode::standard)
        .def_property_readonly("mode", &PolySpec::mode)
        .def_property_readonly("const_term", &PolySpec::const_term)
        .def_property_readonly("gamma", &PolySpec::gamma)
        .def_property_readonly("degree", &PolySpec::degree)
        .def_property_readonly("register_size", &PolySpec::register_size)
        .def("coefficients", &PolySpec::coefficient_map)
        .def("evaluate_scalar", &PolySpec::evaluate_scalar)
        .def("with_mode", &PolySpec::with_mode);

    py::class_<DensityMatrix>(m, "DensityMatrix")
        .def(py::init([](const ComplexArray& a) { return DensityMatrix(to_matrix(a)); }))
        .def_property_readonly("dim", &DensityMatrix::dim)
        .def_property_readonly("eigenvalues", &DensityMatrix::eigenvalues)
        .def("matrix", [](const DensityMatrix& d) { return to_array(d.matrix()); })
        .def_static("maximally_mixed", &DensityMatrix::maximally_mixed)
        .def_static("from_diagonal",
                    [](const std::vector<double>& p) { return DensityMatrix::from_diagonal(p); });

    py::class_<CopyLedger>(m, "CopyLedger")
        .def_readonly("shots", &CopyLedger::shots)
        .def_readonly("fresh_copies_total", &CopyLedger::fresh_copies_total)
        .def_readonly("expected_per_shot", &CopyLedger::expected_per_shot)
        .def_property_readonly("empirical_per_shot", &CopyLedger::empirical_per_shot);

    py::class_<EstimateReport>(m, "EstimateReport")
        .def_readonly("estimate", &EstimateReport::estimate)
        .def_readonly("std_error", &EstimateReport::std_error)
        .def_readonly("shots", &EstimateReport::shots)
        .def_readonly("copies", &EstimateReport::copies)
        .def_readonly("exact_value", &EstimateReport::exact_value)
        .def_readonly("reference_value", &EstimateReport::reference_value)
        .def_readonly("spec_degree", &EstimateReport::spec_degree);

    py::class_<FidelityReport>(m, "FidelityReport")
        .def_readonly("root", &FidelityReport::root)
        .def_readonly("fidelity_raw", &FidelityReport::fidelity_raw)
        .def_readonly("fidelity_clamped", &FidelityReport::fidelity_clamped)
        .def_readonly("exact_poly_fidelity", &FidelityReport::exact_poly_fidelity)
        .def_readonly("exact_fidelity", &FidelityReport::exact_fidelity)
        .def_readonly("degree", &FidelityReport::degree);

    py::class_<MaxEigResult>(m, "MaxEigResult")
        .def_readonly("beta", &MaxEigResult::beta)
        .def_readonly("degenerate", &MaxEigResult::degenerate)
        .def_property_readonly("trajectory",
                               [](const MaxEigResult& r) { return format_trajectory(r.history); });

    m.def("random_state", &random_state, py::arg("d"), py::arg("rank"), py::arg("seed"));
    m.def("trace_power", &trace_power);
    m.def("von_neumann_entropy", &von_neumann_entropy);
    m.def("fidelity_exact", &fidelity_exact);
    m.def("poly_function_exact", &poly_function_exact);
    m.def("entropy_taylor_spec", &entropy_taylor_spec, py::arg("order"), py::arg("mode") = Mode::standard);
    m.def("sqrt_taylor_spec", &sqrt_taylor_spec, py::arg("degree"), py::arg("mode") = Mode::standard);
    py::class_<StepFit>(m, "StepFit")
        .def_readonly("spec", &StepFit::spec)
        .def_readonly("residual", &StepFit::residual)
        .def_readonly("steepness", &StepFit::steepness);
    m.def("step_poly_spec", [](double beta, int degree) { return step_poly_spec(beta, degree); },
          py::arg("beta"), py::arg("degree") = 16);
    m.def("shots_for", &shots_for, py::arg("epsilon"), py::arg("delta"), py::arg("gamma"));

    m.def(
        "expectation_x_full",
        [](const PolySpec& spec, const DensityMatrix& rho) { return expectation_x(simulate_full(spec, rho)); },
        "<X> on the ancilla from the dense circuit simulation");

    m.def(
        "estimate_poly",
        [](const PolySpec& spec, const DensityMatrix& rho, std::uint64_t shots, std::uint64_t seed,
           unsigned workers) {
            py::gil_scoped_release release;
            return estimate_poly(spec, trace_powers(rho, spec.degree()), shots, seed, workers);
        },
        py::arg("spec"), py::arg("rho"), py::arg("shots"), py::arg("seed"), py::arg("workers") = 1);

    m.def(
        "estimate_entropy",
        [](const DensityMatrix& rho, double epsilon, double delta, std::uint64_t seed, Mode mode) {
            py::gil_scoped_release release;
            SampleOptions so;
            so.mode = mode;
            return estimate_entropy(rho, epsilon, delta, seed, so);
        },
        py::arg("rho"), py::arg("epsilon"), py::arg("delta"), py::arg("seed"), py::arg("mode") = Mode::standard);

    m.def(
        "estimate_fidelity",
        [](const DensityMatrix& rho, const DensityMatrix& sigma, double epsilon, double delta, std::uint64_t seed) {
            py::gil_scoped_release release;
            return estimate_fidelity(rho, sigma, epsilon, delta, seed);
        },
        py::arg("rho"), py::arg("sigma"), py::arg("epsilon"), py::arg("delta"), py::arg("seed"));

    m.def(
        "max_eigenvalue",
        [](const DensityMatrix& rho, double tol, int degree, double width_cutoff) {
            MaxEigOptions o;
            o.tol = tol;
            o.degree = degree;
            o.width_cutoff = width_cutoff;
            return max_eigenvalue(rho, o);
        },
        py::arg("rho"), py::arg("tol") = MaxEigOptions{}.tol, py::arg("degree") = MaxEigOptions{}.degree,
        py::arg("width_cutoff") = MaxEigOptions{}.width_cutoff, "Bisection with exact probes");

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out;
            std::ostringstream err;
            int code = 0;
            {
                py::gil_scoped_release release;
                code = cli::run(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run one CLI command; returns (exit_code, stdout, stderr)");
}
