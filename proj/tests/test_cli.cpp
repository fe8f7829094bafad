#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <filesystem>
#include <string>

#include "acrosense/common.hpp"
#include "acrosense/core_data.hpp"
#include "acrosense/synthgen.hpp"

using namespace acrosense;

namespace {

const std::string kCli = ACROSENSE_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("acrosense_cli_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// One small corpus shared by the heavier CLI cases.
const std::filesystem::path& corpus_dir() {
    static const std::filesystem::path dir = [] {
        const auto d = scratch_dir("corpus");
        auto cfg = synth::small_config(90, 5);
        data::save_corpus(synth::generate(cfg), d);
        return d;
    }();
    return dir;
}

}  // namespace

TEST_CASE("no arguments exits with code 1 and prints usage") {
    const std::string cmd = kCli + " >/tmp/acrosense_usage.txt 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 1);
    const auto text = read_file("/tmp/acrosense_usage.txt");
    CHECK(text.find("Usage") != std::string::npos);
    std::filesystem::remove("/tmp/acrosense_usage.txt");
}

TEST_CASE("unknown flags exit with code 1") {
    CHECK(run("synth --nonsense 1") == 1);
}

TEST_CASE("synth writes a loadable corpus") {
    const auto dir = scratch_dir("synth");
    CHECK(run("synth --out " + dir.string() + " --n 40 --athletes 5 --seed 3") == 0);
    const auto corpus = data::load_corpus(dir / "manifest.json");
    CHECK(corpus.size() == 40);
    CHECK(corpus.athlete_set.size() == 5);
    std::filesystem::remove_all(dir);
}

TEST_CASE("spectra then train echoes the requested kernel hyperparameters") {
    const auto dir = scratch_dir("train_echo");
    const auto feats = dir / "feats.bin";
    CHECK(run("spectra --manifest " + (corpus_dir() / "manifest.json").string() +
              " --bins 60 --out " + feats.string()) == 0);

    const auto model = dir / "model.bin";
    const auto report = dir / "train.json";
    CHECK(run("train --features " + feats.string() +
              " --kernel \"C(925.599)*RQ(l=22.788,a=23618.3)\" --out " + model.string() +
              " --report " + report.string()) == 0);
    const auto text = read_file(report);
    CHECK(text.find("925.599") != std::string::npos);
    CHECK(text.find("22.788") != std::string::npos);
    CHECK(text.find("23618.3") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("preprocess pads or interpolates on request") {
    const auto dir = scratch_dir("preprocess");
    CHECK(run("preprocess --manifest " + (corpus_dir() / "manifest.json").string() +
              " --mode interpolate --len 128 --out " + (dir / "interp.bin").string()) ==
          0);
    CHECK(run("preprocess --manifest " + (corpus_dir() / "manifest.json").string() +
              " --mode pad --out " + (dir / "padded.bin").string()) == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("explore emits a JSON report and an SVG scatter") {
    const auto dir = scratch_dir("explore");
    const auto feats = dir / "feats.bin";
    CHECK(run("spectra --manifest " + (corpus_dir() / "manifest.json").string() +
              " --bins 40 --out " + feats.string()) == 0);
    CHECK(run("explore --features " + feats.string() + " --q 3 --seed 4 --out " +
              (dir / "explore.json").string() + " --svg " +
              (dir / "scatter.svg").string()) == 0);
    const auto text = read_file(dir / "explore.json");
    CHECK(text.find("explained_variance_ratio") != std::string::npos);
    CHECK(text.find("\"ari\"") != std::string::npos);
    const auto svg = read_file(dir / "scatter.svg");
    CHECK(svg.find("<svg") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("pipeline produces a complete, reproducible eval.json") {
    const auto dir = scratch_dir("pipeline");
    const std::string common =
        "pipeline --manifest " + (corpus_dir() / "manifest.json").string() +
        " --cv sgkf --seed 7 --bins 40 --folds 3 --search-iters 2 "
        "--holdout-athletes 2 --target-holdout 25 --sizes 30,50 --repeats 2 --out ";
    CHECK(run(common + (dir / "run1").string()) == 0);
    CHECK(run(common + (dir / "run2").string()) == 0);

    const auto a = read_file(dir / "run1" / "eval.json");
    const auto b = read_file(dir / "run2" / "eval.json");
    CHECK(!a.empty());
    CHECK(a == b);

    // All report sections present.
    for (const char* key :
         {"\"scheme\"", "\"kernel\"", "\"cv_accuracy_mean\"", "\"cv_accuracy_std\"",
          "\"holdout_accuracy\"", "\"confusion_matrix\"", "\"learning_curve\"",
          "\"importance\"", "\"seed\"", "\"config_hash\""}) {
        CHECK(a.find(key) != std::string::npos);
    }
    CHECK(std::filesystem::exists(dir / "run1" / "confusion.csv"));
    CHECK(std::filesystem::exists(dir / "run1" / "model.bin"));
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(corpus_dir());
}
