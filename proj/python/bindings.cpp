#include "stripcs/concentration.hpp"
#include "stripcs/ensembles.hpp"
#include "stripcs/experiment.hpp"
#include "stripcs/recon.hpp"
#include "stripcs/stripcheck.hpp"
#include "stripcs/wht.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace stripcs;
using nlohmann::json;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

ComplexArray to_array(const std::vector<Complex>& v) {
    return ComplexArray(static_cast<py::ssize_t>(v.size()), v.data());
}

std::span<const Complex> view(const ComplexArray& a) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array");
    return {a.data(), static_cast<std::size_t>(a.size())};
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Deterministic sensing matrices: certificates, bounds and reconstruction";
    m.attr("__version__") = tool_version();

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<SensingMatrix>(m, "Matrix")
        .def_property_readonly("rows", &SensingMatrix::rows)
        .def_property_readonly("cols", &SensingMatrix::cols)
        .def_property_readonly("family", [](const SensingMatrix& s) { return family_name(s.family()); })
        .def_property_readonly("spec", [](const SensingMatrix& s) { return s.spec().to_json().dump(); })
        .def("describe", [](const SensingMatrix& s) { return s.spec().describe(); })
        .def("column", [](const SensingMatrix& s, std::uint64_t j) { return to_array(s.column(j)); }, py::arg("j"))
        .def("column_sums", [](const SensingMatrix& s) { return to_array(s.column_sums()); })
        .def(
            "apply_sparse",
            [](const SensingMatrix& s, const std::vector<std::uint64_t>& idx, const ComplexArray& values) {
                return to_array(s.apply_sparse(idx, view(values)));
            },
            py::arg("indices"), py::arg("values"))
        .def("__repr__", [](const SensingMatrix& s) {
            return "<stripcs.Matrix " + s.spec().describe() + " N=" + std::to_string(s.rows()) +
                   " C=" + std::to_string(s.cols()) + ">";
        });

    m.def("build_matrix", [](const std::string& spec) { return build_from_spec(MatrixSpec::from_json(json::parse(spec))); },
          py::arg("spec_json"));

    m.def(
        "certify",
        [](const SensingMatrix& s, const std::string& mode, double tol, std::uint64_t seed, unsigned threads) {
            CertifyOptions opt;
            if (mode == "sampled") opt.mode = CertifyMode::Sampled;
            else if (mode != "exhaustive") throw std::invalid_argument("mode: expected exhaustive or sampled");
            opt.tol = tol;
            opt.seed = seed;
            opt.threads = threads;
            py::gil_scoped_release release;
            return certify(s, opt).to_json().dump();
        },
        py::arg("matrix"), py::arg("mode") = "exhaustive", py::arg("tol") = 1e-9, py::arg("seed") = 0,
        py::arg("threads") = 1);

    m.def("column_sum_eta", &column_sum_eta, py::arg("matrix"), py::arg("tol") = 1e-9);

    m.def(
        "strip_delta",
        [](double N, double C, double k, double eps, double eta) {
            const auto d = strip_delta(N, C, k, eps, eta);
            return py::make_tuple(d.value, d.vacuous);
        },
        py::arg("N"), py::arg("C"), py::arg("k"), py::arg("eps"), py::arg("eta"));
    m.def("coherence_mean", &coherence_mean, py::arg("N"), py::arg("C"), py::arg("k"));
    m.def("coherence_threshold", &coherence_threshold, py::arg("N"), py::arg("C"), py::arg("k"), py::arg("eta"),
          py::arg("delta"));
    m.def("gaussian_tail_S", &gaussian_tail_S, py::arg("r"), py::arg("dof"));
    m.def("regularized_gamma_q", &regularized_gamma_q, py::arg("a"), py::arg("x"));
    m.def(
        "mcdiarmid_bound", [](const std::vector<double>& c, double gamma) { return mcdiarmid_bound(c, gamma); },
        py::arg("c"), py::arg("gamma"));

    m.def(
        "fwht",
        [](const ComplexArray& v) {
            auto out = fwht_copy(view(v));
            return to_array(out);
        },
        py::arg("v"));

    m.def(
        "measure",
        [](const SensingMatrix& s, const std::vector<std::uint64_t>& idx, const ComplexArray& values,
           const std::string& noise, double sigma, std::uint64_t seed) {
            const auto vals = view(values);
            if (vals.size() != idx.size()) throw std::invalid_argument("indices and values differ in length");
            std::vector<std::pair<std::uint64_t, Complex>> entries;
            for (std::size_t i = 0; i < idx.size(); ++i) entries.emplace_back(idx[i], vals[i]);
            const SparseSignal alpha(s.cols(), std::move(entries));
            const auto me = measure(s, alpha, NoiseModel{parse_noise_kind(noise), sigma}, seed);
            return py::make_tuple(to_array(me.f), me.noise_norm);
        },
        py::arg("matrix"), py::arg("indices"), py::arg("values"), py::arg("noise") = "none", py::arg("sigma") = 0.0,
        py::arg("seed") = 0);

    m.def(
        "reconstruct",
        [](const SensingMatrix& s, const ComplexArray& f, std::size_t k_max, const std::string& options) {
            auto opt = ReconOptions::from_json(json::parse(options));
            opt.k_max = k_max;
            const auto fv = view(f);
            std::vector<Complex> copy(fv.begin(), fv.end());
            py::gil_scoped_release release;
            return quadratic_reconstruct(s, copy, opt).to_json().dump();
        },
        py::arg("matrix"), py::arg("f"), py::arg("k_max"), py::arg("options_json") = "{}");

    m.def(
        "run_experiment",
        [](const std::string& config) {
            const auto cfg = ExperimentConfig::from_json(json::parse(config));
            py::gil_scoped_release release;
            const auto rec = run_experiment(cfg);
            return json{{"config_hash", rec.config_hash}, {"summary", rec.summary}, {"files", rec.files},
                        {"wall_time", rec.wall_time}, {"pass", rec.pass}}
                .dump();
        },
        py::arg("config_json"));
}
