#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "tabebm/cli.hpp"
#include "tabebm/dataset.hpp"
#include "tabebm/errors.hpp"
#include "tabebm/io.hpp"

using namespace tabebm;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "tabebm_cli_test";
    fs::create_directories(dir);
    return dir;
}

fs::path write_input() {
    const fs::path p = scratch() / "input.csv";
    io::write_text(p,
                   "a,b,kind,label\n"
                   "0.1,1.2,x,yes\n0.3,1.0,y,no\n0.2,0.8,x,yes\n1.5,0.1,y,no\n"
                   "0.4,1.1,x,yes\n1.3,0.3,y,no\n0.0,0.9,y,yes\n1.1,0.2,x,no\n");
    return p;
}

int run(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "tabebm");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (out_text != nullptr) {
        *out_text = out.str();
    }
    return code;
}

}  // namespace

TEST_CASE("defaults") {
    const auto cfg = cli::parse_config({"tabebm", "generate", "--input", "a.csv", "--label-col", "y", "--out", "o.csv"});
    CHECK(cfg.command == "generate");
    CHECK(cfg.num_samples == 500);
    CHECK(cfg.negatives.count == 4);
    CHECK(cfg.negatives.alpha_dist == 5.0);
    CHECK(cfg.sgld.alpha_step == 0.1);
    CHECK(cfg.sgld.alpha_noise == 0.01);
    CHECK(cfg.sgld.sigma_start == 0.01);
    CHECK(cfg.sgld.steps == 200);
    CHECK(cfg.backend == "rbf");
}

TEST_CASE("flags override the config file") {
    const fs::path conf = scratch() / "conf.json";
    io::write_text(conf, R"({"alpha-step": 0.1, "steps": 50, "input": "a.csv", "label-col": "y", "out": "o.csv"})");
    auto cfg = cli::parse_config({"tabebm", "generate", "--config", conf.string(), "--alpha-step", "0.3"});
    CHECK(cfg.sgld.alpha_step == 0.3);
    CHECK(cfg.sgld.steps == 50);
    CHECK(cfg.input == "a.csv");

    io::write_text(conf, R"({"not-a-key": 1})");
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--config", conf.string()}), ConfigError);
    io::write_text(conf, R"({"steps": "many"})");
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--config", conf.string()}), ConfigError);
    io::write_text(conf, "{ not json");
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--config", conf.string()}), ConfigError);
}

TEST_CASE("usage errors") {
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "launch"}), UsageError);
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--bogus", "1"}), UsageError);
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--input", "a.csv"}), UsageError);
    CHECK_THROWS_AS(cli::parse_config({"tabebm", "generate", "--input", "a", "--label-col", "y", "--out", "o",
                                       "--steps", "ten"}),
                    UsageError);
    CHECK(run({"generate", "--bogus"}) == cli::kUsage);
    CHECK(run({"frobnicate"}) == cli::kUsage);
}

TEST_CASE("generate writes the requested rows and metadata") {
    const fs::path in = write_input();
    const fs::path out = scratch() / "syn.csv";
    REQUIRE(run({"generate", "--input", in.string(), "--label-col", "label", "--out", out.string(),
                 "--num-samples", "37", "--steps", "20", "--seed", "3"}) == cli::kOk);
    const auto syn = load_csv(out, "label");
    CHECK(syn.rows() == 37);
    const auto meta = io::Json::parse(io::read_text(out.string() + ".meta.json"));
    CHECK(meta["seed"] == 3);
    CHECK(meta["config"]["steps"] == 20);
    CHECK(meta["class_counts"].size() == 2);

    const fs::path raw = scratch() / "raw.csv";
    REQUIRE(run({"generate", "--input", in.string(), "--label-col", "label", "--out", raw.string(),
                 "--num-samples", "10", "--steps", "5", "--inverse-transform", "--distribution", "[0.3,0.7]"}) ==
            cli::kOk);
    const auto text = io::read_text(raw);
    CHECK(text.rfind("a,b,kind_encoded,label\n", 0) == 0);

    CHECK(run({"generate", "--input", in.string(), "--label-col", "label", "--out", raw.string(),
               "--num-samples", "0"}) == cli::kDataError);
    CHECK(run({"generate", "--input", in.string(), "--label-col", "label", "--out", raw.string(),
               "--distribution", "[0.5,0.6]"}) == cli::kDataError);
    CHECK(run({"generate", "--input", (scratch() / "missing.csv").string(), "--label-col", "label", "--out",
               raw.string()}) == cli::kDataError);
}

TEST_CASE("evaluate") {
    const fs::path in = write_input();
    const fs::path syn = scratch() / "eval_syn.csv";
    REQUIRE(run({"generate", "--input", in.string(), "--label-col", "label", "--out", syn.string(),
                 "--num-samples", "40", "--steps", "10"}) == cli::kOk);
    const fs::path rep = scratch() / "report.json";
    REQUIRE(run({"evaluate", "--real", in.string(), "--synthetic", syn.string(), "--label-col", "label", "--out",
                 rep.string()}) == cli::kOk);
    const auto j = io::Json::parse(io::read_text(rep));
    CHECK(j["inverse_kl"]["per_feature"].size() == 2);
    CHECK(j["chi2_pvalue"]["per_feature"].size() == 1);
    CHECK(fs::exists(scratch() / "report.csv"));

    const fs::path raw = scratch() / "eval_raw.csv";
    REQUIRE(run({"generate", "--input", in.string(), "--label-col", "label", "--out", raw.string(),
                 "--num-samples", "40", "--steps", "10", "--inverse-transform"}) == cli::kOk);
    CHECK(run({"evaluate", "--real", in.string(), "--synthetic", raw.string(), "--label-col", "label", "--out",
               rep.string(), "--space", "raw"}) == cli::kOk);

    const fs::path bad = scratch() / "bad.csv";
    io::write_text(bad, "a,z,kind,label\n1,2,3,yes\n2,3,4,no\n");
    CHECK(run({"evaluate", "--real", in.string(), "--synthetic", bad.string(), "--label-col", "label", "--out",
               rep.string()}) == cli::kDataError);
}

TEST_CASE("benchmark on a toy dataset writes its files") {
    const fs::path dir = scratch() / "bench";
    fs::remove_all(dir);
    REQUIRE(run({"benchmark", "--dataset", "toy:two-moons", "--out-dir", dir.string(), "--repeats", "1",
                 "--sizes", "20", "--toy-rows-per-class", "60", "--num-samples", "50", "--steps", "10"}) == cli::kOk);
    const auto results = io::read_text(dir / "results.csv");
    CHECK(results.rfind("dataset,size,seed,predictor,condition,balanced_accuracy\n", 0) == 0);
    const auto summary = io::Json::parse(io::read_text(dir / "summary.json"));
    CHECK(summary.contains("adtm_aggregate"));
}

TEST_CASE("diagnose") {
    const fs::path in = write_input();
    const fs::path out = scratch() / "profile.csv";
    REQUIRE(run({"diagnose", "--input", in.string(), "--label-col", "label", "--class", "1", "--radii", "0,1,2",
                 "--directions", "20", "--out", out.string()}) == cli::kOk);
    const auto text = io::read_text(out);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(run({"diagnose", "--input", in.string(), "--label-col", "label", "--class", "2", "--out", out.string()}) ==
          cli::kDataError);
}

TEST_CASE("print-config dumps resolved values") {
    std::string text;
    REQUIRE(run({"generate", "--input", "a.csv", "--label-col", "y", "--out", "o.csv", "--steps", "7",
                 "--print-config"},
                &text) == cli::kOk);
    const auto j = io::Json::parse(text);
    CHECK(j["steps"] == 7);
    CHECK(j["alpha-noise"] == 0.01);
}
