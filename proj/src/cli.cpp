#include "tabebm/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/generator.hpp"
#include "tabebm/harness.hpp"
#include "tabebm/io.hpp"
#include "tabebm/metrics.hpp"
#include "tabebm/parallel.hpp"
#include "tabebm/toy_data.hpp"

namespace tabebm::cli {

using Json = nlohmann::json;

namespace {

enum class Kind { text, count, real, flag, real_list, count_list, text_list };

struct Option {
    std::string name;
    Kind kind;
    std::string help;
    std::set<std::string> commands;
    std::function<void(CliConfig&, const Json&)> set;
    std::function<Json(const CliConfig&)> get;
};

const std::set<std::string> kCommands = {"generate", "evaluate", "benchmark", "diagnose"};

std::size_t as_count(const Json& v) {
    if (v.is_number_unsigned()) {
        return v.get<std::size_t>();
    }
    if (v.is_number_integer() && v.get<long long>() >= 0) {
        return static_cast<std::size_t>(v.get<long long>());
    }
    throw ConfigError("expected a non-negative integer, got " + v.dump());
}

double as_real(const Json& v) {
    if (!v.is_number()) {
        throw ConfigError("expected a number, got " + v.dump());
    }
    return v.get<double>();
}

std::string as_text(const Json& v) {
    if (!v.is_string()) {
        throw ConfigError("expected a string, got " + v.dump());
    }
    return v.get<std::string>();
}

bool as_flag(const Json& v) {
    if (!v.is_boolean()) {
        throw ConfigError("expected true or false, got " + v.dump());
    }
    return v.get<bool>();
}

template <class F>
auto as_list(const Json& v, F&& element) {
    if (!v.is_array()) {
        throw ConfigError("expected a list, got " + v.dump());
    }
    std::vector<decltype(element(v))> out;
    for (const auto& e : v) {
        out.push_back(element(e));
    }
    return out;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        if (!cur.empty()) {
            parts.push_back(cur);
        }
    }
    return parts;
}

Json parse_number(const std::string& s, bool integral) {
    if (integral) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) {
            throw UsageError("expected a non-negative integer, got '" + s + "'");
        }
        return v;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw UsageError("expected a number, got '" + s + "'");
    }
    return v;
}

// Flag text to the JSON value a config file would hold for the same key.
Json flag_value(Kind kind, const std::string& s) {
    switch (kind) {
        case Kind::text: return s;
        case Kind::count: return parse_number(s, true);
        case Kind::real: return parse_number(s, false);
        case Kind::flag: return true;
        case Kind::real_list:
        case Kind::count_list: {
            Json arr = Json::array();
            for (const auto& p : split_commas(s)) {
                arr.push_back(parse_number(p, kind == Kind::count_list));
            }
            return arr;
        }
        case Kind::text_list: {
            Json arr = Json::array();
            for (const auto& p : split_commas(s)) {
                arr.push_back(p);
            }
            return arr;
        }
    }
    return s;
}

#define TABEBM_FIELD(field, conv)                                              \
    [](CliConfig& c, const Json& v) { c.field = conv(v); },                    \
        [](const CliConfig& c) -> Json { return c.field; }

const std::vector<Option>& options() {
    static const std::vector<Option> table = [] {
        const std::set<std::string> all = kCommands;
        const std::set<std::string> fits = {"generate", "benchmark", "diagnose"};
        const std::set<std::string> sampling = {"generate", "benchmark"};
        const std::set<std::string> loads = {"generate", "evaluate", "benchmark", "diagnose"};
        std::vector<Option> t;
        t.push_back({"seed", Kind::count, "Master random seed", all, TABEBM_FIELD(seed, as_count)});
        t.push_back({"threads", Kind::count, "Worker threads (0 = hardware)", all, TABEBM_FIELD(threads, as_count)});
        t.push_back({"input", Kind::text, "Input CSV", {"generate", "diagnose"}, TABEBM_FIELD(input, as_text)});
        t.push_back({"label-col", Kind::text, "Name of the label column", loads, TABEBM_FIELD(label_col, as_text)});
        t.push_back({"out", Kind::text, "Output file", {"generate", "evaluate", "diagnose"}, TABEBM_FIELD(out, as_text)});
        t.push_back({"backend", Kind::text, "Classifier backend: rbf or mlp", fits, TABEBM_FIELD(backend, as_text)});
        t.push_back({"sigma-source", Kind::text, "Spread for negatives: per_class or global", fits,
                     TABEBM_FIELD(sigma_source, as_text)});
        t.push_back({"neg-count", Kind::count, "Negative samples per class", fits,
                     TABEBM_FIELD(negatives.count, as_count)});
        t.push_back({"alpha-dist", Kind::real, "Distance of negatives in standard deviations", fits,
                     TABEBM_FIELD(negatives.alpha_dist, as_real)});
        t.push_back({"alpha-step", Kind::real, "SGLD step size", sampling, TABEBM_FIELD(sgld.alpha_step, as_real)});
        t.push_back({"alpha-noise", Kind::real, "SGLD noise scale", sampling, TABEBM_FIELD(sgld.alpha_noise, as_real)});
        t.push_back({"sigma-start", Kind::real, "Chain initialization noise", sampling,
                     TABEBM_FIELD(sgld.sigma_start, as_real)});
        t.push_back({"steps", Kind::count, "SGLD steps", sampling, TABEBM_FIELD(sgld.steps, as_count)});
        t.push_back({"num-samples", Kind::count, "Synthetic rows", sampling, TABEBM_FIELD(num_samples, as_count)});
        t.push_back({"distribution", Kind::text, "Class distribution: empirical, uniform or a JSON array",
                     {"generate"},
                     [](CliConfig& c, const Json& v) { c.distribution = v.is_array() ? v.dump() : as_text(v); },
                     [](const CliConfig& c) -> Json { return c.distribution; }});
        t.push_back({"allocation", Kind::text, "exact_stratified or sampled", {"generate"},
                     TABEBM_FIELD(allocation, as_text)});
        t.push_back({"inverse-transform", Kind::flag, "Write rows in the original feature scale", {"generate"},
                     TABEBM_FIELD(inverse_transform, as_flag)});
        t.push_back({"energy-trace", Kind::text, "Per-class energy trace CSV prefix", {"generate"},
                     TABEBM_FIELD(energy_trace, as_text)});
        t.push_back({"real", Kind::text, "Real CSV", {"evaluate"}, TABEBM_FIELD(real, as_text)});
        t.push_back({"synthetic", Kind::text, "Synthetic CSV", {"evaluate"}, TABEBM_FIELD(synthetic, as_text)});
        t.push_back({"out-csv", Kind::text, "Flat metric table", {"evaluate"}, TABEBM_FIELD(out_csv, as_text)});
        t.push_back({"space", Kind::text, "Synthetic file space: preprocessed or raw", {"evaluate"},
                     TABEBM_FIELD(space, as_text)});
        t.push_back({"kl-bins", Kind::count, "Histogram bins for inverse KL", {"evaluate"},
                     TABEBM_FIELD(kl_bins, as_count)});
        t.push_back({"presence-bins", Kind::count, "Quantile cells per dimension for delta-presence",
                     {"evaluate"}, TABEBM_FIELD(presence_bins, as_count)});
        t.push_back({"class", Kind::count, "Class id to profile", {"diagnose"}, TABEBM_FIELD(class_id, as_count)});
        t.push_back({"radii", Kind::real_list, "Comma-separated probe radii", {"diagnose"},
                     [](CliConfig& c, const Json& v) { c.radii = as_list(v, as_real); },
                     [](const CliConfig& c) -> Json { return c.radii; }});
        t.push_back({"directions", Kind::count, "Random directions per radius", {"diagnose"},
                     TABEBM_FIELD(directions, as_count)});
        t.push_back({"out-dir", Kind::text, "Directory for results.csv and summary.json", {"benchmark"},
                     TABEBM_FIELD(out_dir, as_text)});
        t.push_back({"dataset", Kind::text, "CSV path, toy:blobs, toy:two-moons or toy:blobs23", {"benchmark"},
                     TABEBM_FIELD(dataset, as_text)});
        t.push_back({"sizes", Kind::count_list, "Comma-separated training subset sizes", {"benchmark"},
                     [](CliConfig& c, const Json& v) { c.sizes = as_list(v, as_count); },
                     [](const CliConfig& c) -> Json { return c.sizes; }});
        t.push_back({"repeats", Kind::count, "Repeats per size", {"benchmark"}, TABEBM_FIELD(repeats, as_count)});
        t.push_back({"predictors", Kind::text_list, "Comma-separated: logistic_regression, knn", {"benchmark"},
                     [](CliConfig& c, const Json& v) { c.predictors = as_list(v, as_text); },
                     [](const CliConfig& c) -> Json { return c.predictors; }});
        t.push_back({"experiment-mode", Kind::text, "augmentation or sharing", {"benchmark"},
                     TABEBM_FIELD(experiment_mode, as_text)});
        t.push_back({"sharing-validation", Kind::text, "real or synthetic", {"benchmark"},
                     TABEBM_FIELD(sharing_validation, as_text)});
        t.push_back({"toy-rows-per-class", Kind::count, "Rows per class of toy datasets", {"benchmark"},
                     TABEBM_FIELD(toy_rows_per_class, as_count)});
        t.push_back({"toy-dims", Kind::count, "Dimensions of toy blobs", {"benchmark"},
                     TABEBM_FIELD(toy_dims, as_count)});
        t.push_back({"knn-k", Kind::count, "Neighbours of the k-NN predictor", {"benchmark"},
                     TABEBM_FIELD(knn_k, as_count)});
        t.push_back({"lr-learning-rate", Kind::real, "Logistic regression step size", {"benchmark"},
                     TABEBM_FIELD(lr_learning_rate, as_real)});
        t.push_back({"lr-epochs", Kind::count, "Logistic regression epochs", {"benchmark"},
                     TABEBM_FIELD(lr_epochs, as_count)});
        t.push_back({"lr-patience", Kind::count, "Early stopping patience", {"benchmark"},
                     TABEBM_FIELD(lr_patience, as_count)});
        return t;
    }();
    return table;
}

#undef TABEBM_FIELD

const Option* find_option(const std::string& name) {
    for (const auto& o : options()) {
        if (o.name == name) {
            return &o;
        }
    }
    return nullptr;
}

void apply_config_file(CliConfig& cfg, const std::string& path) {
    Json doc;
    try {
        doc = Json::parse(io::read_text(path));
    } catch (const Json::exception& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    } catch (const FileError& e) {
        throw ConfigError(e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config file " + path + " must hold a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        const Option* opt = find_option(key);
        if (opt == nullptr || !opt->commands.contains(cfg.command)) {
            throw ConfigError("unrecognized config key '" + key + "' for command " + cfg.command);
        }
        try {
            opt->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
}

void require(const std::string& value, const std::string& flag) {
    if (value.empty()) {
        throw UsageError("--" + flag + " is required");
    }
}

void check_one_of(const std::string& value, std::initializer_list<const char*> allowed, const std::string& flag) {
    for (const char* a : allowed) {
        if (value == a) {
            return;
        }
    }
    throw UsageError("invalid value '" + value + "' for --" + flag);
}

void validate(const CliConfig& cfg) {
    if (cfg.command == "generate") {
        require(cfg.input, "input");
        require(cfg.label_col, "label-col");
        require(cfg.out, "out");
        check_one_of(cfg.allocation, {"exact_stratified", "sampled"}, "allocation");
    } else if (cfg.command == "evaluate") {
        require(cfg.real, "real");
        require(cfg.synthetic, "synthetic");
        require(cfg.label_col, "label-col");
        require(cfg.out, "out");
        check_one_of(cfg.space, {"preprocessed", "raw"}, "space");
    } else if (cfg.command == "benchmark") {
        require(cfg.dataset, "dataset");
        require(cfg.out_dir, "out-dir");
        check_one_of(cfg.experiment_mode, {"augmentation", "sharing"}, "experiment-mode");
        check_one_of(cfg.sharing_validation, {"real", "synthetic"}, "sharing-validation");
        for (const auto& p : cfg.predictors) {
            check_one_of(p, {"logistic_regression", "knn"}, "predictors");
        }
        if (cfg.dataset.rfind("toy:", 0) != 0) {
            require(cfg.label_col, "label-col");
        }
    } else if (cfg.command == "diagnose") {
        require(cfg.input, "input");
        require(cfg.label_col, "label-col");
        require(cfg.out, "out");
    }
    if (cfg.command != "evaluate") {
        check_one_of(cfg.backend, {"rbf", "mlp"}, "backend");
        check_one_of(cfg.sigma_source, {"per_class", "global"}, "sigma-source");
    }
}

BackendConfig backend_for(const CliConfig& cfg) {
    if (cfg.backend == "mlp") {
        MlpConfig m;
        m.seed = cfg.seed;
        return m;
    }
    return RbfConfig{};
}

NegativeSampleConfig negatives_for(const CliConfig& cfg) {
    NegativeSampleConfig n = cfg.negatives;
    n.seed = cfg.seed;
    return n;
}

SigmaSource sigma_source_for(const CliConfig& cfg) {
    return cfg.sigma_source == "global" ? SigmaSource::global : SigmaSource::per_class;
}

ClassDistribution distribution_for(const std::string& s) {
    if (s == "empirical") {
        return EmpiricalDistribution{};
    }
    if (s == "uniform") {
        return UniformDistribution{};
    }
    Json arr;
    try {
        arr = Json::parse(s);
    } catch (const Json::exception&) {
        throw UsageError("--distribution must be empirical, uniform or a JSON array of probabilities");
    }
    if (!arr.is_array()) {
        throw UsageError("--distribution must be empirical, uniform or a JSON array of probabilities");
    }
    ExplicitDistribution d;
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw UsageError("--distribution entries must be numbers");
        }
        d.probabilities.push_back(v.get<double>());
    }
    return d;
}

std::filesystem::path with_suffix(const std::filesystem::path& p, const std::string& suffix) {
    return p.string() + suffix;
}

void ensure_parent(const std::filesystem::path& p) {
    if (p.has_parent_path()) {
        std::filesystem::create_directories(p.parent_path());
    }
}

// Settings stored next to outputs; the worker count never changes results.
Json recorded_config(const CliConfig& cfg) {
    Json j = config_to_json(cfg);
    j.erase("threads");
    return j;
}

void run_generate(const CliConfig& cfg, std::ostream& out) {
    const TabularDataset raw = load_csv(cfg.input, cfg.label_col);
    const Preprocessor prep = Preprocessor::fit(raw);
    const TabularDataset train = prep.apply(raw, true);
    const auto ebms = fit_all_class_ebms(train, negatives_for(cfg), backend_for(cfg), sigma_source_for(cfg));

    GenerationRequest req;
    req.total = cfg.num_samples;
    req.distribution = distribution_for(cfg.distribution);
    req.mode = cfg.allocation == "sampled" ? AllocationMode::sampled : AllocationMode::exact_stratified;
    req.seed = cfg.seed;
    SGLDConfig sgld = cfg.sgld;
    sgld.seed = cfg.seed;
    sgld.record_trace = !cfg.energy_trace.empty();

    SyntheticDataset syn = generate(ebms, train, req, sgld);
    if (cfg.inverse_transform) {
        syn = inverse_transform(prep, syn);
    }

    ensure_parent(cfg.out);
    io::write_text(cfg.out, io::synthetic_to_csv(syn));
    Json meta = io::metadata_to_json(syn.metadata);
    meta["input"] = cfg.input;
    meta["label_column"] = cfg.label_col;
    meta["rows"] = syn.rows();
    meta["columns"] = syn.column_names;
    meta["class_names"] = syn.class_names;
    meta["negatives"] = io::negatives_to_json(negatives_for(cfg));
    meta["backend"] = io::backend_to_json(backend_for(cfg));
    meta["sigma_source"] = cfg.sigma_source;
    meta["space"] = cfg.inverse_transform ? "raw" : "preprocessed";
    meta["config"] = recorded_config(cfg);
    io::write_text(with_suffix(cfg.out, ".meta.json"), meta.dump(2) + "\n");

    if (sgld.record_trace) {
        for (std::size_t c = 0; c < syn.energy_traces.size(); ++c) {
            if (!syn.energy_traces[c].empty()) {
                const auto path = with_suffix(cfg.energy_trace, ".class" + std::to_string(c) + ".csv");
                ensure_parent(path);
                write_energy_trace_csv(syn.energy_traces[c], path);
            }
        }
    }
    for (const auto& w : syn.metadata.warnings) {
        out << "warning: " << w << "\n";
    }
    out << "wrote " << syn.rows() << " rows to " << cfg.out << "\n";
}

// Synthetic file to preprocessed-space rows aligned with the real schema.
SyntheticDataset load_synthetic(const CliConfig& cfg, const TabularDataset& real, const Preprocessor& prep) {
    const auto& columns = prep.columns();
    const std::string text = io::read_text(cfg.synthetic);
    const auto header = split_csv_line(text.substr(0, text.find('\n')));
    std::map<std::string, ColumnKind> overrides;
    for (const auto& c : columns) {
        const bool keep_text = cfg.space == "raw" && c.kind == ColumnKind::categorical;
        for (const auto& [name, kind] : {std::pair{c.name, keep_text ? ColumnKind::categorical : ColumnKind::numeric},
                                         std::pair{c.name + "_encoded", ColumnKind::numeric}}) {
            if (std::find(header.begin(), header.end(), name) != header.end()) {
                overrides[name] = kind;
            }
        }
    }
    const TabularDataset file = parse_csv(text, cfg.label_col, overrides);
    if (file.cols() != columns.size()) {
        throw SchemaMismatch("synthetic file has " + std::to_string(file.cols()) + " feature columns, real data has " +
                             std::to_string(columns.size()));
    }

    SyntheticDataset syn;
    syn.features = Matrix(file.rows(), file.cols());
    syn.column_names = real.column_names;
    syn.class_names = real.class_names;
    syn.label_name = real.label_name;
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const std::string& name = file.column_names[j];
        const bool encoded = name == columns[j].name + "_encoded";
        if (name != columns[j].name && !(encoded && columns[j].kind == ColumnKind::categorical)) {
            throw SchemaMismatch("synthetic column '" + name + "' does not match real column '" + columns[j].name + "'");
        }
        for (std::size_t i = 0; i < file.rows(); ++i) {
            double v = file.features(i, j);
            if (cfg.space == "preprocessed") {
                if (is_missing(v)) {
                    throw SchemaMismatch("synthetic column '" + name + "' has missing cells");
                }
                syn.features(i, j) = v;
                continue;
            }
            if (columns[j].kind == ColumnKind::categorical) {
                if (is_missing(v)) {
                    v = prep.encode_level(j, columns[j].impute_level);
                } else if (!encoded) {
                    v = prep.encode_level(j, file.levels[j].at(static_cast<std::size_t>(v)));
                }
            } else if (is_missing(v)) {
                v = columns[j].impute_value;
            }
            syn.features(i, j) = prep.scale(j, v);
        }
    }
    std::map<std::string, std::size_t> class_ids;
    for (std::size_t c = 0; c < real.class_names.size(); ++c) {
        class_ids[real.class_names[c]] = c;
    }
    for (std::size_t label : file.labels) {
        const auto it = class_ids.find(file.class_names[label]);
        if (it == class_ids.end()) {
            throw SchemaMismatch("synthetic class '" + file.class_names[label] + "' does not occur in the real data");
        }
        syn.labels.push_back(it->second);
    }
    return syn;
}

void run_evaluate(const CliConfig& cfg, std::ostream& out) {
    const TabularDataset real = load_csv(cfg.real, cfg.label_col);
    const Preprocessor prep = Preprocessor::fit(real);
    const SyntheticDataset syn = load_synthetic(cfg, real, prep);
    MetricOptions options;
    options.kl_bins = cfg.kl_bins;
    options.presence_bins = cfg.presence_bins;
    const MetricReport report = fidelity_report(prep, real, syn, options);

    ensure_parent(cfg.out);
    io::write_text(cfg.out, io::report_to_json(report).dump(2) + "\n");
    std::filesystem::path csv = cfg.out_csv;
    if (csv.empty()) {
        csv = std::filesystem::path(cfg.out).replace_extension(".csv");
    }
    ensure_parent(csv);
    io::write_text(csv, io::report_to_csv(report));
    out << "inverse_kl_mean " << format_double(report.inverse_kl_mean) << "\n"
        << "ks_pvalue_mean " << format_double(report.ks_pvalue_mean) << "\n"
        << "dcr_median " << format_double(report.dcr_median) << "\n"
        << "delta_presence " << format_double(report.delta_presence) << "\n";
}

TabularDataset benchmark_data(const CliConfig& cfg) {
    if (cfg.dataset == "toy:blobs") {
        return toy::two_class_blobs(cfg.toy_rows_per_class, cfg.toy_dims, cfg.seed);
    }
    if (cfg.dataset == "toy:two-moons") {
        return toy::two_moons(cfg.toy_rows_per_class, 0.1, cfg.seed);
    }
    if (cfg.dataset == "toy:blobs23") {
        return toy::many_class_blobs(23, cfg.toy_dims, cfg.seed);
    }
    if (cfg.dataset.rfind("toy:", 0) == 0) {
        throw UsageError("unknown toy dataset '" + cfg.dataset + "'");
    }
    return load_csv(cfg.dataset, cfg.label_col);
}

void run_benchmark(const CliConfig& cfg, std::ostream& out) {
    ExperimentConfig ex;
    ex.dataset_name = cfg.dataset.rfind("toy:", 0) == 0 ? cfg.dataset.substr(4)
                                                         : std::filesystem::path(cfg.dataset).stem().string();
    ex.data = benchmark_data(cfg);
    ex.sizes = cfg.sizes;
    ex.n_syn = cfg.num_samples;
    ex.repeats = cfg.repeats;
    ex.seed = cfg.seed;
    ex.predictors.clear();
    for (const auto& p : cfg.predictors) {
        if (p == "knn") {
            ex.predictors.push_back(KnnSpec{cfg.knn_k});
        } else {
            ex.predictors.push_back(LogisticRegressionSpec{cfg.lr_learning_rate, cfg.lr_epochs, cfg.lr_patience});
        }
    }
    ex.mode = cfg.experiment_mode == "sharing" ? ExperimentMode::sharing : ExperimentMode::augmentation;
    ex.sharing_validation = cfg.sharing_validation == "synthetic" ? ValidationSource::synthetic : ValidationSource::real;
    ex.split.seed = cfg.seed;
    ex.negatives = negatives_for(cfg);
    ex.backend = backend_for(cfg);
    ex.sgld = cfg.sgld;
    ex.sgld.seed = cfg.seed;

    const ExperimentResult result = run_experiment(ex);
    const std::filesystem::path dir = cfg.out_dir;
    std::filesystem::create_directories(dir);
    io::write_text(dir / "results.csv", io::results_to_csv(result));
    Json summary = io::summary_to_json(result);
    summary["config"] = recorded_config(cfg);
    io::write_text(dir / "summary.json", summary.dump(2) + "\n");
    for (const auto& [key, value] : result.adtm_aggregate) {
        out << key << " adtm " << format_double(value) << "\n";
    }
}

void run_diagnose(const CliConfig& cfg, std::ostream& out) {
    const TabularDataset raw = load_csv(cfg.input, cfg.label_col);
    const Preprocessor prep = Preprocessor::fit(raw);
    const TabularDataset train = prep.apply(raw, true);
    const Matrix rows = class_partition(train, cfg.class_id);
    NegativeSampleConfig neg = negatives_for(cfg);
    neg.seed ^= cfg.class_id;
    BackendConfig backend = backend_for(cfg);
    if (auto* m = std::get_if<MlpConfig>(&backend)) {
        m->seed ^= cfg.class_id;
    }
    Vector sigma;
    if (sigma_source_for(cfg) == SigmaSource::global) {
        sigma = column_std(train.features);
    }
    const ClassEBM ebm = fit_class_ebm(cfg.class_id, rows, neg, backend, sigma);
    const auto profile = energy_distance_profile(ebm, rows, cfg.radii, cfg.directions, cfg.seed);
    ensure_parent(cfg.out);
    io::write_text(cfg.out, io::profile_to_csv(profile));
    out << "wrote " << profile.size() << " radii to " << cfg.out << "\n";
}

}  // namespace

CliConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Class-conditional tabular data synthesis with energy models", "tabebm"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every command");

    std::string config_path;
    bool print_config = false;
    std::map<std::string, std::string> given_text;
    std::map<std::string, CLI::Option*> handles;
    std::map<std::string, CLI::App*> subs;
    for (const auto& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON file with settings keyed by flag name");
        sub->add_flag("--print-config", print_config, "Print the resolved settings and exit");
        subs[name] = sub;
    }
    std::map<std::string, std::map<std::string, std::string>> raw;
    for (const auto& opt : options()) {
        for (const auto& cmd : opt.commands) {
            CLI::App* sub = subs.at(cmd);
            CLI::Option* handle = opt.kind == Kind::flag
                                      ? sub->add_flag("--" + opt.name, opt.help)
                                      : sub->add_option("--" + opt.name, raw[cmd][opt.name], opt.help);
            handles[cmd + "/" + opt.name] = handle;
        }
    }

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        CliConfig help;
        help.command = "help";
        help.out = app.help();
        return help;
    } catch (const CLI::CallForAllHelp&) {
        CliConfig help;
        help.command = "help";
        help.out = app.help("", CLI::AppFormatMode::All);
        return help;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CliConfig cfg;
    for (const auto& [name, sub] : subs) {
        if (sub->parsed()) {
            cfg.command = name;
        }
    }
    cfg.config_path = config_path;
    cfg.print_config = print_config;
    if (!config_path.empty()) {
        apply_config_file(cfg, config_path);
    }
    for (const auto& opt : options()) {
        if (!opt.commands.contains(cfg.command)) {
            continue;
        }
        const CLI::Option* handle = handles.at(cfg.command + "/" + opt.name);
        if (handle->count() == 0) {
            continue;
        }
        try {
            opt.set(cfg, flag_value(opt.kind, raw[cfg.command][opt.name]));
        } catch (const ConfigError& e) {
            throw UsageError("--" + opt.name + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

Json config_to_json(const CliConfig& cfg) {
    Json j = Json::object();
    for (const auto& opt : options()) {
        if (opt.commands.contains(cfg.command)) {
            j[opt.name] = opt.get(cfg);
        }
    }
    return j;
}

void dispatch(const CliConfig& cfg, std::ostream& out) {
    if (cfg.command == "help") {
        out << cfg.out;
        return;
    }
    if (cfg.print_config) {
        out << config_to_json(cfg).dump(2) << "\n";
        return;
    }
    set_max_threads(cfg.threads);
    if (cfg.command == "generate") {
        run_generate(cfg, out);
    } else if (cfg.command == "evaluate") {
        run_evaluate(cfg, out);
    } else if (cfg.command == "benchmark") {
        run_benchmark(cfg, out);
    } else if (cfg.command == "diagnose") {
        run_diagnose(cfg, out);
    } else {
        throw UsageError("unknown command '" + cfg.command + "'");
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        dispatch(parse_config(args), out);
        return kOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
}

}  // namespace tabebm::cli
