#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "acrosense/common.hpp"
#include "acrosense/core_data.hpp"
#include "acrosense/kernels.hpp"
#include "acrosense/spectral.hpp"
#include "acrosense/synthgen.hpp"

using namespace acrosense;

namespace {

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("defaults echo the configured corpus shape") {
    synth::SynthConfig cfg;
    const auto corpus = synth::generate(cfg);
    CHECK(corpus.size() == 1102);
    CHECK(corpus.athlete_set.size() == 16);
    CHECK(corpus.label_set.size() == 6);
    for (const auto& rec : corpus.recordings) {
        CHECK(rec.length() >= 180);
        CHECK(rec.length() <= 720);
        CHECK(rec.sample_rate_hz == 120.0);
    }
}

TEST_CASE("every label is performed by at least two athletes") {
    auto cfg = synth::small_config(60, 4);
    const auto corpus = synth::generate(cfg);
    std::map<std::string, std::set<std::string>> performers;
    for (const auto& r : corpus.recordings) performers[r.label].insert(r.athlete_id);
    for (const auto& [label, athletes] : performers) CHECK(athletes.size() >= 2);
}

TEST_CASE("label marginals follow the configured weights within rounding") {
    synth::SynthConfig cfg;
    cfg.n_recordings = 2000;
    cfg.seed = 12;
    const auto corpus = synth::generate(cfg);
    std::map<std::string, int> counts;
    for (const auto& r : corpus.recordings) ++counts[r.label];
    // Defaults put BHS and RO on top and BF/FW at the bottom.
    CHECK(counts["BHS"] > counts["BT"]);
    CHECK(counts["RO"] > counts["BL"]);
    CHECK(counts["BF"] < counts["BT"]);
    CHECK(counts["FW"] < counts["BL"]);
    // Roughly proportional: BHS carries about a quarter of the corpus.
    CHECK(counts["BHS"] > 2000 * 0.18);
    CHECK(counts["BHS"] < 2000 * 0.32);
}

TEST_CASE("the same seed generates byte-identical CSV trees") {
    auto cfg = synth::small_config(30, 9);
    const auto a = synth::generate(cfg);
    const auto b = synth::generate(cfg);

    const auto dir_a = std::filesystem::temp_directory_path() / "acrosense_synth_a";
    const auto dir_b = std::filesystem::temp_directory_path() / "acrosense_synth_b";
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
    data::save_corpus(a, dir_a);
    data::save_corpus(b, dir_b);

    for (const auto& entry : std::filesystem::directory_iterator(dir_a)) {
        const auto name = entry.path().filename();
        CHECK(read_file(entry.path()) == read_file(dir_b / name));
    }
    std::filesystem::remove_all(dir_a);
    std::filesystem::remove_all(dir_b);
}

TEST_CASE("different seeds give different corpora") {
    auto cfg_a = synth::small_config(30, 1);
    auto cfg_b = synth::small_config(30, 2);
    const auto a = synth::generate(cfg_a);
    const auto b = synth::generate(cfg_b);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size() && !any_difference; ++i) {
        if (a.recordings[i].length() != b.recordings[i].length() ||
            a.recordings[i].channels[3] != b.recordings[i].channels[3]) {
            any_difference = true;
        }
    }
    CHECK(any_difference);
}

TEST_CASE("without noise or athlete effects recordings differ only by duration") {
    auto cfg = synth::small_config(40, 5);
    cfg.noise_std = 0.0;
    cfg.athlete.amplitude_sigma = 0.0;
    cfg.athlete.channel_gain_sigma = 0.0;
    cfg.athlete.timewarp_sigma = 0.0;
    cfg.athlete.tempo_jitter = 0.0;
    cfg.athlete.phase_jitter = 0.0;
    cfg.idle_margin_max = 0.0;
    const auto corpus = synth::generate(cfg);

    std::map<std::pair<std::string, std::size_t>, const data::Recording*> seen;
    for (const auto& rec : corpus.recordings) {
        const auto key = std::make_pair(rec.label, rec.length());
        const auto it = seen.find(key);
        if (it == seen.end()) {
            seen[key] = &rec;
            continue;
        }
        for (int c = 0; c < data::kChannelCount; ++c) {
            CHECK(rec.channels[c] == it->second->channels[c]);
        }
    }
}

TEST_CASE("noise-free distinct templates are 1-NN separable in spectra space") {
    auto cfg = synth::small_config(72, 8);
    cfg.noise_std = 0.0;
    cfg.confusable_coupling = 0.0;
    cfg.athlete.amplitude_sigma = 0.05;
    cfg.athlete.channel_gain_sigma = 0.05;
    cfg.athlete.timewarp_sigma = 0.02;
    cfg.athlete.tempo_jitter = 0.02;
    const auto corpus = synth::generate(cfg);

    spectral::SpectrumConfig scfg;
    scfg.bins = 200;
    const auto fm = spectral::build_spectra_features(corpus, scfg);

    // Leave-one-out nearest neighbour on the feature rows.
    const Eigen::MatrixXd d2 = kernels::pairwise_sqdist_self(fm.values);
    int correct = 0;
    for (Eigen::Index i = 0; i < d2.rows(); ++i) {
        Eigen::Index best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < d2.rows(); ++j) {
            if (j == i) continue;
            if (d2(i, j) < best_d) {
                best_d = d2(i, j);
                best = j;
            }
        }
        if (fm.row_meta[static_cast<std::size_t>(best)].label ==
            fm.row_meta[static_cast<std::size_t>(i)].label) {
            ++correct;
        }
    }
    CHECK(correct == static_cast<int>(fm.rows()));
}

TEST_CASE("coupling pulls the BL and BT templates together") {
    const auto distinct = synth::default_templates(0.0);
    const auto coupled = synth::default_templates(1.0);
    const auto& bl0 = distinct.at("BL").channels[3].harmonics[0];
    const auto& bt0 = distinct.at("BT").channels[3].harmonics[0];
    const auto& bl1 = coupled.at("BL").channels[3].harmonics[0];
    const auto& bt1 = coupled.at("BT").channels[3].harmonics[0];
    CHECK(bl0.freq_hz != bt0.freq_hz);
    CHECK(bl1.freq_hz == doctest::Approx(bt1.freq_hz).epsilon(1e-12));
    CHECK(std::abs(bl1.freq_hz - bt1.freq_hz) <
          std::abs(bl0.freq_hz - bt0.freq_hz));
}

TEST_CASE("planted-channel corpora have a genuinely constant channel") {
    const auto cfg = synth::planted_channel_config(4, 6, 40, 2);
    const auto corpus = synth::generate(cfg);
    for (const auto& rec : corpus.recordings) {
        const auto& flat = rec.channels[8];  // mag_z is the constant one
        for (double v : flat) CHECK(v == flat[0]);
    }
}

TEST_CASE("generator config survives a JSON round trip") {
    auto cfg = synth::small_config(64, 123);
    cfg.templates = synth::default_templates(0.3);
    cfg.noise_std = 0.42;
    const auto text = synth::config_to_json(cfg);
    const auto back = synth::config_from_json(text);
    CHECK(back.n_athletes == cfg.n_athletes);
    CHECK(back.n_recordings == cfg.n_recordings);
    CHECK(back.seed == cfg.seed);
    CHECK(back.noise_std == cfg.noise_std);
    CHECK(back.labels == cfg.labels);
    REQUIRE(back.templates.size() == cfg.templates.size());
    const auto& orig = cfg.templates.at("BT").channels[3].harmonics;
    const auto& copy = back.templates.at("BT").channels[3].harmonics;
    REQUIRE(copy.size() == orig.size());
    for (std::size_t i = 0; i < orig.size(); ++i) {
        CHECK(copy[i].freq_hz == orig[i].freq_hz);
        CHECK(copy[i].amplitude == orig[i].amplitude);
    }
    // Identical configs generate identical corpora.
    const auto a = synth::generate(cfg);
    const auto b = synth::generate(back);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.recordings[i].channels[3] == b.recordings[i].channels[3]);
    }
}

TEST_CASE("invalid configs are rejected") {
    synth::SynthConfig cfg;
    cfg.n_athletes = 1;
    CHECK_THROWS_AS(synth::generate(cfg), ValidationError);
    cfg = synth::SynthConfig{};
    cfg.duration_min = 500;
    cfg.duration_max = 100;
    CHECK_THROWS_AS(synth::generate(cfg), ValidationError);
    cfg = synth::SynthConfig{};
    cfg.confusable_coupling = 1.5;
    CHECK_THROWS_AS(synth::generate(cfg), ValidationError);
}
