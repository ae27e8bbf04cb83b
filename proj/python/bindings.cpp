#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "szego/acceptance.hpp"
#include "szego/asymptotics.hpp"
#include "szego/error.hpp"
#include "szego/hessian.hpp"
#include "szego/lagrangian.hpp"

namespace py = pybind11;
using namespace szego;

namespace {

ChartedSubmanifold from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(e.what());
    }
    return manifold_from_json(j);
}

Amplitude amplitude_of(const ChartedSubmanifold& sub, const std::string& re, const std::optional<std::string>& im) {
    return im ? Amplitude::parse_complex(re, *im, sub.dim()) : Amplitude::parse_real(re, sub.dim());
}

struct Assembled {
    HermitianOperator op;
    std::vector<QuadNode> nodes;
    std::vector<Complex> a;
};

Assembled assemble(const ChartedSubmanifold& sub, double k, const Amplitude& a, std::optional<int> max_degree) {
    const auto coarse = quadrature(sub, {});
    const double R = support_radius(coarse, evaluate(a, coarse));
    const int M = max_degree ? *max_degree : default_max_degree(k, R);
    auto nodes = quadrature(sub, default_quadrature(sub, k, R, M));
    auto av = evaluate(a, nodes);
    HermitianOperator T = assemble_T(FockTruncation(sub.ambient_dim(), k, M), sub, a, nodes);
    return {std::move(T), std::move(nodes), std::move(av)};
}

TestFunction test_function(const std::string& name) {
    if (name == "entropy") return TestFunction::entropy();
    if (name.rfind("power:", 0) == 0) return TestFunction::power(std::stod(name.substr(6)));
    throw InvalidArgument("test function must be \"entropy\" or \"power:n\"");
}

py::dict classification_dict(const Classification& c) {
    py::dict d;
    d["tag"] = to_string(c.tag);
    d["dim"] = c.dim;
    d["ambient_dim"] = c.ambient_dim;
    d["half_rank"] = c.half_rank;
    d["max_abs_H"] = c.max_abs_H;
    d["max_lambda_defect"] = c.max_lambda_defect;
    d["min_lambda"] = c.min_lambda;
    return d;
}

}  // namespace

PYBIND11_MODULE(szego, m) {
    m.doc() = "Berezin-Toeplitz operators supported on submanifolds of C^N";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<NotApplicable>(m, "NotApplicable", base.ptr());
    py::register_exception<DoubleScaling>(m, "DoubleScaling", base.ptr());
    py::register_exception<CostLimit>(m, "CostLimit", base.ptr());
    py::register_exception<NormalizationError>(m, "NormalizationError", base.ptr());
    py::register_exception<BohrSommerfeldViolation>(m, "BohrSommerfeldViolation", base.ptr());

    py::class_<FockTruncation>(m, "FockTruncation")
        .def(py::init<int, double, int>(), py::arg("ambient_dim"), py::arg("k"), py::arg("max_degree"))
        .def_property_readonly("ambient_dim", &FockTruncation::ambient_dim)
        .def_property_readonly("k", &FockTruncation::k)
        .def_property_readonly("max_degree", &FockTruncation::max_degree)
        .def("__len__", &FockTruncation::size)
        .def_property_readonly("basis", &FockTruncation::basis);

    m.def("reproducing_kernel", &reproducing_kernel, py::arg("trunc"), py::arg("z"), py::arg("w"));
    m.def("eval_basis_all", &eval_basis_all, py::arg("trunc"), py::arg("z"));

    py::class_<ChartedSubmanifold>(m, "Manifold")
        .def_property_readonly("kind", &ChartedSubmanifold::kind)
        .def_property_readonly("dim", &ChartedSubmanifold::dim)
        .def_property_readonly("ambient_dim", &ChartedSubmanifold::ambient_dim)
        .def("classify", [](const ChartedSubmanifold& s) { return classification_dict(classify(s)); })
        .def("d_prime", [](const ChartedSubmanifold& s) { return d_prime(s); })
        .def("volume", [](const ChartedSubmanifold& s) { return total_weight(quadrature(s, {})); });

    m.def("manifold", &from_json_text, py::arg("spec"), "Manifold from its JSON description.");
    m.def("circle", &circle, py::arg("radius") = 1.0);
    m.def("sphere3", &sphere3, py::arg("radius") = 1.0);
    m.def("torus_product", &torus_product, py::arg("radii"), py::arg("ambient_dim"));

    py::class_<HermitianOperator>(m, "Operator")
        .def_readonly("matrix", &HermitianOperator::matrix)
        .def_readonly("factor", &HermitianOperator::factor)
        .def_readonly("hermitian", &HermitianOperator::hermitian)
        .def_readonly("boundary_fraction", &HermitianOperator::boundary_fraction)
        .def_readonly("truncation_warning", &HermitianOperator::truncation_warning)
        .def_property_readonly("normalization", [](const HermitianOperator& o) { return to_string(o.normalization); })
        .def_property_readonly("max_degree", [](const HermitianOperator& o) { return o.trunc.max_degree(); })
        .def("eigenvalues",
             [](const HermitianOperator& o) { return eigensolve(o).eigenvalues; })
        .def("schatten_sum", [](const HermitianOperator& o, double p) { return schatten_sum(o, p); }, py::arg("p"))
        .def("exact_trace", [](const HermitianOperator& o) {
            const TraceCheck t = exact_trace(o);
            return py::make_tuple(t.trace, t.prediction, t.relative_gap);
        })
        .def("write_binary", &write_matrix_binary, py::arg("path"));

    m.def(
        "assemble",
        [](const ChartedSubmanifold& sub, double k, const std::string& a, std::optional<std::string> a_im,
           std::optional<int> max_degree, bool scaled) {
            Assembled r = assemble(sub, k, amplitude_of(sub, a, a_im), max_degree);
            return scaled ? scale_to_S(r.op, d_prime(sub)) : r.op;
        },
        py::arg("manifold"), py::arg("k"), py::arg("amplitude") = "1", py::arg("amplitude_im") = py::none(),
        py::arg("max_degree") = py::none(), py::arg("scaled") = false,
        "T (or S when scaled) in the truncated monomial basis with the default quadrature.");

    m.def(
        "szego_check",
        [](const ChartedSubmanifold& sub, double k, const std::string& a, const std::string& phi) {
            const int dp = d_prime(sub);
            Assembled r = assemble(sub, k, amplitude_of(sub, a, std::nullopt), std::nullopt);
            const TestFunction f = test_function(phi);
            const double emp = szego_scale(dp, sub.dim(), k) * trace_phi(eigensolve(scale_to_S(r.op, dp), dp), f);
            return py::make_tuple(emp, szego_functional(sub, r.nodes, r.a, f).value);
        },
        py::arg("manifold"), py::arg("k"), py::arg("amplitude") = "1", py::arg("phi") = "power:2",
        "(empirical, predicted) for the Szego limit of phi.");

    m.def(
        "mellin_log",
        [](const std::string& phi, double alpha, double t) { return mellin_log(test_function(phi), alpha, t); },
        py::arg("phi"), py::arg("alpha"), py::arg("t"));
    m.def("weyl_prediction", py::overload_cast<double, int, double, double>(&weyl_prediction), py::arg("volume"),
          py::arg("d_prime"), py::arg("lo"), py::arg("hi"));
    m.def("entropy", py::overload_cast<const std::vector<double>&>(&entropy), py::arg("probabilities"));

    m.def(
        "verify_sqrt_det",
        [](const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, int q) {
            const SqrtDetReport r = verify_sqrt_det(G, H, q);
            py::dict d;
            d["det_dense"] = r.det_dense;
            d["det_ring"] = r.det_ring;
            d["sqrt_det_dq"] = r.sqrt_det_dq;
            d["delta"] = r.delta;
            d["pass"] = r.pass;
            return d;
        },
        py::arg("G"), py::arg("H"), py::arg("q"));
    m.def("det_closed_form", [](const Eigen::MatrixXd& W, int q) { return det_closed_form(W, q).matrix; },
          py::arg("W"), py::arg("q"));
    m.def("random_metric_pair", &random_metric_pair, py::arg("d"), py::arg("seed"));

    m.def(
        "verify",
        [](const std::vector<std::string>& only) {
            std::vector<Verdict> verdicts;
            {
                py::gil_scoped_release release;
                verdicts = run_acceptance(only);
            }
            py::list out;
            for (const Verdict& v : verdicts) {
                py::dict d;
                d["check_id"] = v.check_id;
                d["observed"] = v.observed;
                d["predicted"] = v.predicted;
                d["tolerance"] = v.tolerance;
                d["pass"] = v.pass;
                d["detail"] = v.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("only") = std::vector<std::string>{});
}
