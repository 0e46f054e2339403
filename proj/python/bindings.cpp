#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tabebm/dataset.hpp"
#include "tabebm/ebm.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/generator.hpp"
#include "tabebm/harness.hpp"
#include "tabebm/io.hpp"
#include "tabebm/metrics.hpp"
#include "tabebm/parallel.hpp"
#include "tabebm/toy_data.hpp"

namespace py = pybind11;
using namespace tabebm;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
    const auto buf = a.request();
    if (buf.ndim == 1) {
        Matrix m(static_cast<std::size_t>(buf.shape[0]), 1);
        std::copy_n(a.data(), buf.shape[0], m.data().begin());
        return m;
    }
    if (buf.ndim != 2) {
        throw DimensionMismatch("expected a 2-D array");
    }
    Matrix m(static_cast<std::size_t>(buf.shape[0]), static_cast<std::size_t>(buf.shape[1]));
    std::copy_n(a.data(), buf.shape[0] * buf.shape[1], m.data().begin());
    return m;
}

Array to_array(const Matrix& m) {
    Array a({m.rows(), m.cols()});
    std::copy(m.data().begin(), m.data().end(), a.mutable_data());
    return a;
}

Vector to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

py::object json_to_py(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

BackendConfig backend_from(const std::string& name, std::uint64_t seed) {
    if (name == "mlp") {
        MlpConfig m;
        m.seed = seed;
        return m;
    }
    if (name != "rbf") {
        throw InvalidArgument("backend must be 'rbf' or 'mlp'");
    }
    return RbfConfig{};
}

ClassDistribution distribution_from(const py::object& d) {
    if (py::isinstance<py::str>(d)) {
        const auto s = d.cast<std::string>();
        if (s == "empirical") {
            return EmpiricalDistribution{};
        }
        if (s == "uniform") {
            return UniformDistribution{};
        }
        throw InvalidArgument("distribution must be 'empirical', 'uniform' or a sequence of probabilities");
    }
    return ExplicitDistribution{d.cast<std::vector<double>>()};
}

}  // namespace

PYBIND11_MODULE(_tabebm, m) {
    m.doc() = "Class-conditional tabular data synthesis with per-class energy models";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", error.ptr());
    py::register_exception<TrainingDivergence>(m, "TrainingDivergence", error.ptr());
    py::register_exception<NonFiniteState>(m, "NonFiniteState", error.ptr());
    auto data_error = py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<SchemaMismatch>(m, "SchemaMismatch", data_error.ptr());
    py::register_exception<EmptyRequest>(m, "EmptyRequest", data_error.ptr());

    m.def("set_max_threads", &set_max_threads, py::arg("n"));

    py::class_<TabularDataset>(m, "Dataset")
        .def_property_readonly("features", [](const TabularDataset& d) { return to_array(d.features); })
        .def_readonly("labels", &TabularDataset::labels)
        .def_readonly("column_names", &TabularDataset::column_names)
        .def_readonly("class_names", &TabularDataset::class_names)
        .def_readonly("label_name", &TabularDataset::label_name)
        .def_property_readonly("categorical",
                               [](const TabularDataset& d) {
                                   std::vector<bool> out;
                                   for (auto k : d.column_kinds) {
                                       out.push_back(k == ColumnKind::categorical);
                                   }
                                   return out;
                               })
        .def_property_readonly("rows", &TabularDataset::rows)
        .def_property_readonly("cols", &TabularDataset::cols)
        .def_property_readonly("class_count", &TabularDataset::class_count)
        .def("__len__", &TabularDataset::rows);

    m.def(
        "dataset_from_arrays",
        [](const Array& x, std::vector<std::size_t> y, std::size_t classes) {
            if (classes == 0) {
                for (auto v : y) {
                    classes = std::max(classes, v + 1);
                }
            }
            return make_numeric_dataset(to_matrix(x), std::move(y), classes);
        },
        py::arg("features"), py::arg("labels"), py::arg("class_count") = 0);
    m.def(
        "load_csv", [](const std::string& path, const std::string& label) { return load_csv(path, label); },
        py::arg("path"), py::arg("label_column"));
    m.def(
        "parse_csv", [](const std::string& text, const std::string& label) { return parse_csv(text, label); },
        py::arg("text"), py::arg("label_column"));

    py::class_<Preprocessor>(m, "Preprocessor")
        .def_static("fit", &Preprocessor::fit, py::arg("train"))
        .def("apply", &Preprocessor::apply, py::arg("dataset"), py::arg("is_training") = false)
        .def("scale", &Preprocessor::scale)
        .def("unscale", &Preprocessor::unscale)
        .def_property_readonly("means",
                               [](const Preprocessor& p) {
                                   Vector out;
                                   for (const auto& c : p.columns()) {
                                       out.push_back(c.mean);
                                   }
                                   return out;
                               })
        .def_property_readonly("stddevs", [](const Preprocessor& p) {
            Vector out;
            for (const auto& c : p.columns()) {
                out.push_back(c.stddev);
            }
            return out;
        });

    py::class_<ClassEBM>(m, "ClassEBM")
        .def_property_readonly("class_id", &ClassEBM::class_id)
        .def_property_readonly("dim", &ClassEBM::dim)
        .def_property_readonly("negatives", [](const ClassEBM& e) { return to_array(e.negatives()); })
        .def_property_readonly("sigma", &ClassEBM::sigma)
        .def("energy", [](const ClassEBM& e, const Array& x) { return e.energy(to_vector(x)); })
        .def("energy_gradient", [](const ClassEBM& e, const Array& x) { return e.energy_gradient(to_vector(x)); })
        .def("logits",
             [](const ClassEBM& e, const Array& x) {
                 const auto l = e.logits(to_vector(x));
                 return py::make_tuple(l.f0, l.f1);
             })
        .def("to_json", [](const ClassEBM& e) { return io::ebm_to_json(e).dump(); });

    m.def(
        "fit_class_ebms",
        [](const TabularDataset& train, const std::string& backend, std::size_t neg_count, double alpha_dist,
           std::uint64_t seed, const std::string& sigma_source) {
            NegativeSampleConfig neg;
            neg.count = neg_count;
            neg.alpha_dist = alpha_dist;
            neg.seed = seed;
            const SigmaSource source = sigma_source == "global" ? SigmaSource::global : SigmaSource::per_class;
            return fit_all_class_ebms(train, neg, backend_from(backend, seed), source);
        },
        py::arg("train"), py::arg("backend") = "rbf", py::arg("neg_count") = 4, py::arg("alpha_dist") = 5.0,
        py::arg("seed") = 0, py::arg("sigma_source") = "per_class");

    py::class_<SyntheticDataset>(m, "SyntheticDataset")
        .def_property_readonly("features", [](const SyntheticDataset& s) { return to_array(s.features); })
        .def_readonly("labels", &SyntheticDataset::labels)
        .def_readonly("column_names", &SyntheticDataset::column_names)
        .def_readonly("class_names", &SyntheticDataset::class_names)
        .def_property_readonly("metadata",
                               [](const SyntheticDataset& s) { return json_to_py(io::metadata_to_json(s.metadata)); })
        .def("to_csv", &io::synthetic_to_csv)
        .def("__len__", &SyntheticDataset::rows);

    m.def(
        "generate",
        [](const std::vector<ClassEBM>& ebms, const TabularDataset& train, std::size_t total,
           const py::object& distribution, const std::string& mode, std::uint64_t seed, double alpha_step,
           double alpha_noise, double sigma_start, std::size_t steps) {
            GenerationRequest req;
            req.total = total;
            req.distribution = distribution_from(distribution);
            req.mode = mode == "sampled" ? AllocationMode::sampled : AllocationMode::exact_stratified;
            req.seed = seed;
            SGLDConfig sgld{alpha_step, alpha_noise, sigma_start, steps, seed, false};
            py::gil_scoped_release release;
            return generate(ebms, train, req, sgld);
        },
        py::arg("ebms"), py::arg("train"), py::arg("total") = 500, py::arg("distribution") = "empirical",
        py::arg("mode") = "exact_stratified", py::arg("seed") = 0, py::arg("alpha_step") = 0.1,
        py::arg("alpha_noise") = 0.01, py::arg("sigma_start") = 0.01, py::arg("steps") = 200);
    m.def("inverse_transform", &inverse_transform, py::arg("preprocessor"), py::arg("synthetic"));
    m.def("allocate_class_counts", [](const std::vector<double>& p, std::size_t total) {
        return allocate_class_counts(p, total);
    });

    m.def(
        "inverse_kl",
        [](const Array& a, const Array& b, std::size_t bins) { return inverse_kl(to_vector(a), to_vector(b), bins); },
        py::arg("real"), py::arg("synthetic"), py::arg("bins") = 10);
    m.def("ks_two_sample", [](const Array& a, const Array& b) {
        const auto r = ks_two_sample(to_vector(a), to_vector(b));
        return py::make_tuple(r.statistic, r.p_value);
    });
    m.def("chi2_test", [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        const auto r = chi2_test(a, b);
        return py::make_tuple(r.statistic, r.p_value);
    });
    m.def("dcr", [](const Array& real, const Array& syn) { return dcr(to_matrix(real), to_matrix(syn)); });
    m.def(
        "delta_presence",
        [](const Array& real, const Array& syn, std::size_t bins) {
            return delta_presence(to_matrix(real), to_matrix(syn), bins);
        },
        py::arg("real"), py::arg("synthetic"), py::arg("bins_per_dim") = 2);
    m.def(
        "fidelity_report",
        [](const Preprocessor& prep, const TabularDataset& real, const SyntheticDataset& syn) {
            return json_to_py(io::report_to_json(fidelity_report(prep, real, syn)));
        },
        py::arg("preprocessor"), py::arg("real"), py::arg("synthetic"));

    m.def("balanced_accuracy", [](const std::vector<std::size_t>& t, const std::vector<std::size_t>& p) {
        return balanced_accuracy(t, p);
    });
    m.def("adtm_normalize", &adtm_normalize, py::arg("scores"));
    m.def(
        "run_experiment",
        [](const TabularDataset& data, std::vector<std::size_t> sizes, std::size_t n_syn, std::size_t repeats,
           std::uint64_t seed, std::size_t steps) {
            ExperimentConfig cfg;
            cfg.data = data;
            cfg.sizes = std::move(sizes);
            cfg.n_syn = n_syn;
            cfg.repeats = repeats;
            cfg.seed = seed;
            cfg.sgld.steps = steps;
            ExperimentResult result;
            {
                py::gil_scoped_release release;
                result = run_experiment(cfg);
            }
            return json_to_py(io::summary_to_json(result));
        },
        py::arg("data"), py::arg("sizes") = std::vector<std::size_t>{20}, py::arg("n_syn") = 500,
        py::arg("repeats") = 10, py::arg("seed") = 0, py::arg("steps") = 200);

    auto toy_mod = m.def_submodule("toy", "Built-in toy datasets");
    toy_mod.def("two_class_blobs", &toy::two_class_blobs, py::arg("rows_per_class"), py::arg("dims"),
                py::arg("seed") = 0);
    toy_mod.def("two_moons", &toy::two_moons, py::arg("rows_per_class"), py::arg("noise") = 0.1, py::arg("seed") = 0);
    toy_mod.def("many_class_blobs", &toy::many_class_blobs, py::arg("classes"), py::arg("dims"), py::arg("seed") = 0);
}
