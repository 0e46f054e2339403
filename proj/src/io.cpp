#include "tabebm/io.hpp"

#include <fstream>
#include <sstream>

#include "tabebm/errors.hpp"

namespace tabebm::io {

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        rows.push_back(Vector(r.begin(), r.end()));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrix_from_json(const Json& j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    Matrix m(rows, cols);
    const auto& data = j.at("data");
    if (data.size() != rows) {
        throw SchemaError("matrix JSON row count mismatch");
    }
    for (std::size_t i = 0; i < rows; ++i) {
        const auto values = data[i].get<Vector>();
        if (values.size() != cols) {
            throw SchemaError("matrix JSON column count mismatch");
        }
        std::copy(values.begin(), values.end(), m.row(i).begin());
    }
    return m;
}

Json classifier_to_json(const ClassifierModel& model) {
    if (const auto* rbf = std::get_if<RbfModel>(&model.backend())) {
        return {{"backend", "rbf"},
                {"bandwidth", rbf->bandwidth},
                {"kernel_floor", rbf->kernel_floor},
                {"positives", matrix_to_json(rbf->positives)},
                {"negatives", matrix_to_json(rbf->negatives)}};
    }
    const auto& mlp = std::get<MlpModel>(model.backend());
    return {{"backend", "mlp"},
            {"seed", mlp.seed},
            {"learning_rate", mlp.learning_rate},
            {"w1", matrix_to_json(mlp.w1)},
            {"b1", mlp.b1},
            {"w2", matrix_to_json(mlp.w2)},
            {"b2", mlp.b2},
            {"training",
             {{"epochs", mlp.record.epochs},
              {"final_loss", mlp.record.final_loss},
              {"training_accuracy", mlp.record.training_accuracy}}}};
}

ClassifierModel classifier_from_json(const Json& j) {
    try {
        const auto backend = j.at("backend").get<std::string>();
        if (backend == "rbf") {
            RbfModel m;
            m.bandwidth = j.at("bandwidth").get<double>();
            m.kernel_floor = j.at("kernel_floor").get<double>();
            m.positives = matrix_from_json(j.at("positives"));
            m.negatives = matrix_from_json(j.at("negatives"));
            return ClassifierModel(std::move(m));
        }
        if (backend == "mlp") {
            MlpModel m;
            m.seed = j.at("seed").get<std::uint64_t>();
            m.learning_rate = j.at("learning_rate").get<double>();
            m.w1 = matrix_from_json(j.at("w1"));
            m.b1 = j.at("b1").get<Vector>();
            m.w2 = matrix_from_json(j.at("w2"));
            m.b2 = j.at("b2").get<Vector>();
            const auto& t = j.at("training");
            m.record = {t.at("epochs").get<std::size_t>(), t.at("final_loss").get<double>(),
                        t.at("training_accuracy").get<double>()};
            return ClassifierModel(std::move(m));
        }
        throw SchemaError("unknown classifier backend '" + backend + "'");
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("malformed classifier JSON: ") + e.what());
    }
}

Json ebm_to_json(const ClassEBM& ebm) {
    return {{"class_id", ebm.class_id()},
            {"sigma", ebm.sigma()},
            {"negatives", matrix_to_json(ebm.negatives())},
            {"classifier", classifier_to_json(ebm.classifier())}};
}

ClassEBM ebm_from_json(const Json& j) {
    try {
        return ClassEBM(j.at("class_id").get<std::size_t>(), classifier_from_json(j.at("classifier")),
                        matrix_from_json(j.at("negatives")), j.at("sigma").get<Vector>());
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("malformed EBM JSON: ") + e.what());
    }
}

Json ebm_bundle_to_json(std::span<const ClassEBM> ebms) {
    Json out = Json::array();
    for (const auto& e : ebms) {
        out.push_back(ebm_to_json(e));
    }
    return out;
}

std::vector<ClassEBM> ebm_bundle_from_json(const Json& j) {
    if (!j.is_array()) {
        throw SchemaError("EBM bundle must be a JSON array");
    }
    std::vector<ClassEBM> out;
    for (const auto& item : j) {
        out.push_back(ebm_from_json(item));
    }
    return out;
}

Json sgld_to_json(const SGLDConfig& cfg) {
    return {{"alpha_step", cfg.alpha_step},
            {"alpha_noise", cfg.alpha_noise},
            {"sigma_start", cfg.sigma_start},
            {"steps", cfg.steps}};
}

Json negatives_to_json(const NegativeSampleConfig& cfg) {
    return {{"count", cfg.count}, {"alpha_dist", cfg.alpha_dist}, {"sigma_floor", cfg.sigma_floor},
            {"seed", cfg.seed}};
}

Json backend_to_json(const BackendConfig& cfg) {
    if (const auto* rbf = std::get_if<RbfConfig>(&cfg)) {
        Json j = {{"backend", "rbf"}, {"kernel_floor", rbf->kernel_floor},
                  {"min_bandwidth", rbf->min_bandwidth}};
        j["bandwidth"] = rbf->bandwidth ? Json(*rbf->bandwidth) : Json("median_heuristic");
        return j;
    }
    const auto& mlp = std::get<MlpConfig>(cfg);
    return {{"backend", "mlp"}, {"hidden", mlp.hidden}, {"learning_rate", mlp.learning_rate},
            {"epochs", mlp.epochs}, {"seed", mlp.seed}};
}

Json metadata_to_json(const GenerationMetadata& meta) {
    return {{"seed", meta.seed},
            {"mode", meta.mode == AllocationMode::exact_stratified ? "exact_stratified" : "sampled"},
            {"distribution", meta.distribution},
            {"probabilities", meta.probabilities},
            {"class_counts", meta.class_counts},
            {"class_seeds", meta.class_seeds},
            {"sgld", sgld_to_json(meta.sgld)},
            {"inverse_transformed", meta.inverse_transformed},
            {"warnings", meta.warnings}};
}

namespace {

Json scores_to_json(const std::vector<FeatureScore>& scores) {
    Json out = Json::object();
    for (const auto& s : scores) {
        out[s.feature] = s.value;
    }
    return out;
}

}  // namespace

Json report_to_json(const MetricReport& report) {
    return {{"inverse_kl", {{"per_feature", scores_to_json(report.inverse_kl)}, {"mean", report.inverse_kl_mean}}},
            {"ks_pvalue", {{"per_feature", scores_to_json(report.ks_pvalue)}, {"mean", report.ks_pvalue_mean}}},
            {"chi2_pvalue",
             {{"per_feature", scores_to_json(report.chi2_pvalue)},
              {"mean", report.chi2_pvalue_mean ? Json(*report.chi2_pvalue_mean) : Json(nullptr)}}},
            {"dcr_median", report.dcr_median},
            {"delta_presence", report.delta_presence}};
}

std::string report_to_csv(const MetricReport& report) {
    std::ostringstream out;
    out << "metric,feature,value\n";
    auto section = [&](const char* metric, const std::vector<FeatureScore>& scores) {
        for (const auto& s : scores) {
            out << metric << ',' << s.feature << ',' << format_double(s.value) << '\n';
        }
    };
    section("inverse_kl", report.inverse_kl);
    out << "inverse_kl_mean,," << format_double(report.inverse_kl_mean) << '\n';
    section("ks_pvalue", report.ks_pvalue);
    out << "ks_pvalue_mean,," << format_double(report.ks_pvalue_mean) << '\n';
    section("chi2_pvalue", report.chi2_pvalue);
    if (report.chi2_pvalue_mean) {
        out << "chi2_pvalue_mean,," << format_double(*report.chi2_pvalue_mean) << '\n';
    }
    out << "dcr_median,," << format_double(report.dcr_median) << '\n';
    out << "delta_presence,," << format_double(report.delta_presence) << '\n';
    return out.str();
}

std::string synthetic_to_csv(const SyntheticDataset& syn) {
    std::ostringstream out;
    for (const auto& name : syn.column_names) {
        out << name << ',';
    }
    out << syn.label_name << '\n';
    for (std::size_t i = 0; i < syn.rows(); ++i) {
        for (double v : syn.features.row(i)) {
            out << format_double(v) << ',';
        }
        out << syn.class_names.at(syn.labels[i]) << '\n';
    }
    return out.str();
}

std::string results_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "dataset,size,seed,predictor,condition,balanced_accuracy\n";
    for (const auto& r : result.records) {
        out << r.dataset << ',' << r.size << ',' << r.seed << ',' << r.predictor << ',' << r.condition
            << ',' << format_double(r.balanced_accuracy) << '\n';
    }
    return out.str();
}

Json summary_to_json(const ExperimentResult& result) {
    Json groups = Json::array();
    for (const auto& s : result.summary) {
        groups.push_back({{"size", s.size},
                          {"predictor", s.predictor},
                          {"condition", s.condition},
                          {"runs", s.runs},
                          {"mean", s.mean},
                          {"std", s.stddev},
                          {"adtm", s.adtm}});
    }
    return {{"dataset", result.dataset}, {"groups", groups}, {"adtm_aggregate", result.adtm_aggregate}};
}

std::string profile_to_csv(const std::vector<ProfileRow>& rows) {
    std::ostringstream out;
    out << "radius,mean_f0,mean_f1,mean_energy,mean_relative_density\n";
    for (const auto& r : rows) {
        out << format_double(r.radius) << ',' << format_double(r.mean_f0) << ',' << format_double(r.mean_f1)
            << ',' << format_double(r.mean_energy) << ',' << format_double(r.mean_relative_density) << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FileError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw FileError("error writing '" + path.string() + "'");
    }
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FileError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace tabebm::io
