#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "acrosense/common.hpp"
#include "acrosense/preprocess.hpp"
#include "acrosense/synthgen.hpp"

using namespace acrosense;
using prep::PipelineConfig;

namespace {

// Oracle: evaluate the piecewise-linear interpolant of `input` at an
// arbitrary parameter position in [0, len-1].
double interp_at(const std::vector<double>& input, double pos) {
    if (pos <= 0.0) return input.front();
    if (pos >= static_cast<double>(input.size() - 1)) return input.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return input[i] * (1.0 - frac) + input[i + 1] * frac;
}

}  // namespace

TEST_CASE("resample_linear preserves constants") {
    const std::vector<double> x = {5.0, 5.0, 5.0};
    const auto y = prep::resample_linear(x, 898);
    REQUIRE(y.size() == 898);
    for (double v : y) CHECK(v == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("resample_linear of a ramp forces the midpoints") {
    const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    const auto y = prep::resample_linear(x, 7);
    const std::vector<double> want = {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    REQUIRE(y.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-15));
    }
}

TEST_CASE("resampling up and back down stays on the interpolant") {
    Rng rng(99);
    std::vector<double> x(137);
    for (auto& v : x) v = rng.uniform(-4.0, 4.0);

    const auto up = prep::resample_linear(x, 898);
    const auto back = prep::resample_linear(up, 137);

    // Oracle: the round trip through a denser grid stays within the local
    // linear-interpolation error of direct evaluation at the original
    // abscissae; endpoints are exact.
    CHECK(back.front() == x.front());
    CHECK(back.back() == x.back());
    double max_dev = 0.0;
    for (std::size_t k = 0; k < back.size(); ++k) {
        const double pos = static_cast<double>(k) * 897.0 / 136.0;  // position on `up`
        const double direct = interp_at(up, pos);
        max_dev = std::max(max_dev, std::abs(back[k] - direct));
    }
    CHECK(max_dev < 1e-12);
}

TEST_CASE("resample_linear output stays within the input bounds") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(2 + rng.below(200));
        for (auto& v : x) v = rng.uniform(-10.0, 10.0);
        const double lo = *std::min_element(x.begin(), x.end());
        const double hi = *std::max_element(x.begin(), x.end());
        const auto y = prep::resample_linear(x, 1 + static_cast<int>(rng.below(500)));
        for (double v : y) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
    }
}

TEST_CASE("resample_linear rejects inputs shorter than two samples") {
    CHECK_THROWS_AS(prep::resample_linear({1.0}, 10), ValidationError);
}

TEST_CASE("pad_zeros appends trailing zeros") {
    const auto y = prep::pad_zeros({1.0, 2.0}, 5);
    const std::vector<double> want = {1.0, 2.0, 0.0, 0.0, 0.0};
    CHECK(y == want);
}

TEST_CASE("pad_zeros at the target length is the identity") {
    const std::vector<double> x = {1.0, 2.0, 3.0};
    CHECK(prep::pad_zeros(x, 3) == x);
}

TEST_CASE("pad_zeros rejects inputs longer than the target") {
    CHECK_THROWS_AS(prep::pad_zeros({1.0, 2.0, 3.0}, 2), ValidationError);
}

TEST_CASE("padding the longest recording leaves it unchanged") {
    auto cfg = synth::small_config(20, 5);
    const auto corpus = synth::generate(cfg);
    std::size_t longest = 0;
    for (const auto& r : corpus.recordings) longest = std::max(longest, r.length());
    for (const auto& r : corpus.recordings) {
        if (r.length() == longest) {
            const auto padded =
                prep::pad_zeros(r.channels[0], static_cast<int>(longest));
            CHECK(padded == r.channels[0]);
        }
    }
}

TEST_CASE("raw interpolated feature rows have 9 x 898 columns") {
    auto cfg = synth::small_config(15, 8);
    const auto corpus = synth::generate(cfg);
    PipelineConfig pc;
    pc.normalization = prep::Normalization::kNone;
    const auto fm = prep::build_features(corpus, pc);
    CHECK(fm.cols() == 8082);
    CHECK(fm.rows() == 15);
    CHECK(fm.feature_layout.kind == "raw");
    CHECK(fm.feature_layout.block_size == 898);
}

TEST_CASE("z-scoring identical recordings flags zero variance and zeroes the matrix") {
    auto cfg = synth::small_config(12, 9);
    cfg.noise_std = 0.0;
    cfg.athlete.amplitude_sigma = 0.0;
    cfg.athlete.channel_gain_sigma = 0.0;
    cfg.athlete.timewarp_sigma = 0.0;
    cfg.athlete.tempo_jitter = 0.0;
    cfg.athlete.phase_jitter = 0.0;
    cfg.idle_margin_max = 0.0;
    cfg.labels = {"A", "B"};
    cfg.label_weights = {1.0, 1.0};
    cfg.templates["A"] = synth::default_templates(0.0)["BT"];
    cfg.templates["B"] = synth::default_templates(0.0)["BT"];
    // Freeze durations so every recording is bit-identical.
    cfg.templates["A"].duration_spread = 0.0;
    cfg.templates["B"].duration_spread = 0.0;
    cfg.duration_min = cfg.duration_max = 300;
    const auto corpus = synth::generate(cfg);

    PipelineConfig pc;
    const auto fm = prep::build_features(corpus, pc);
    // All rows identical => every channel has zero variance across samples
    // only if the channel is constant; the sinusoid channels vary across
    // time, so only flat channels get flagged. Instead check the mag_z-free
    // case directly: identical rows => all columns identical => per-channel
    // std across (rows x time) comes from the time axis, not the rows.
    for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
        for (Eigen::Index r = 1; r < fm.values.rows(); ++r) {
            CHECK(fm.values(r, c) == fm.values(0, c));
        }
    }

    // A genuinely constant corpus: every channel flagged and zeroed.
    data::Corpus flat;
    for (int i = 0; i < 4; ++i) {
        data::Recording rec;
        rec.id = "r" + std::to_string(i);
        rec.athlete_id = "a" + std::to_string(i % 2);
        rec.label = i % 2 ? "X" : "Y";
        rec.sample_rate_hz = 120.0;
        for (auto& ch : rec.channels) ch.assign(50, 2.5);
        flat.recordings.push_back(rec);
    }
    flat.rebuild_index();
    const auto zfm = prep::build_features(flat, pc);
    for (const auto& st : zfm.norm_stats) CHECK(st.zero_variance);
    CHECK(zfm.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("z-score statistics are fit on the training rows only") {
    auto cfg = synth::small_config(40, 12);
    const auto corpus = synth::generate(cfg);
    std::vector<std::string> train_ids;
    for (std::size_t i = 0; i < corpus.recordings.size(); ++i) {
        if (i % 2 == 0) train_ids.push_back(corpus.recordings[i].id);
    }
    PipelineConfig pc;
    const auto fm = prep::build_features(corpus, pc, train_ids);

    const auto train_idx = fm.rows_for_ids(train_ids);
    const std::set<std::size_t> train_set(train_idx.begin(), train_idx.end());

    for (std::size_t b = 0; b < fm.feature_layout.channels.size(); ++b) {
        if (fm.norm_stats[b].zero_variance) continue;
        const auto [lo, hi] = fm.block_range(static_cast<int>(b));
        double train_sum = 0.0, train_sq = 0.0, hold_sum = 0.0;
        std::size_t train_n = 0, hold_n = 0;
        for (std::size_t r = 0; r < fm.rows(); ++r) {
            const auto row = fm.values.row(static_cast<Eigen::Index>(r));
            const double s = row.segment(lo, hi - lo).sum();
            const double sq = row.segment(lo, hi - lo).squaredNorm();
            if (train_set.count(r)) {
                train_sum += s;
                train_sq += sq;
                train_n += static_cast<std::size_t>(hi - lo);
            } else {
                hold_sum += s;
                hold_n += static_cast<std::size_t>(hi - lo);
            }
        }
        const double train_mean = train_sum / static_cast<double>(train_n);
        const double train_std =
            std::sqrt(train_sq / static_cast<double>(train_n) - train_mean * train_mean);
        CHECK(std::abs(train_mean) < 1e-10);
        CHECK(std::abs(train_std - 1.0) < 1e-9);
        // Holdout rows were standardized with foreign statistics; their means
        // will generally sit away from zero.
        CHECK(std::isfinite(hold_sum / static_cast<double>(hold_n)));
    }
}

TEST_CASE("feature building is bit-deterministic") {
    auto cfg = synth::small_config(20, 21);
    const auto corpus = synth::generate(cfg);
    PipelineConfig pc;
    const auto a = prep::build_features(corpus, pc);
    const auto b = prep::build_features(corpus, pc);
    REQUIRE(a.values.size() == b.values.size());
    for (Eigen::Index i = 0; i < a.values.size(); ++i) {
        CHECK(a.values.data()[i] == b.values.data()[i]);
    }
}

TEST_CASE("feature container round-trips through disk") {
    auto cfg = synth::small_config(16, 33);
    const auto corpus = synth::generate(cfg);
    PipelineConfig pc;
    const auto fm = prep::build_features(corpus, pc);

    const auto path = std::filesystem::temp_directory_path() / "acrosense_feat_test.bin";
    prep::save_features(fm, path, "{\"probe\":1}");
    std::string extra;
    const auto loaded = prep::load_features(path, &extra);
    CHECK(extra.find("probe") != std::string::npos);
    CHECK(loaded.rows() == fm.rows());
    CHECK(loaded.cols() == fm.cols());
    for (Eigen::Index i = 0; i < fm.values.size(); ++i) {
        CHECK(loaded.values.data()[i] == fm.values.data()[i]);
    }
    CHECK(loaded.row_meta.size() == fm.row_meta.size());
    for (std::size_t i = 0; i < fm.row_meta.size(); ++i) {
        CHECK(loaded.row_meta[i].id == fm.row_meta[i].id);
        CHECK(loaded.row_meta[i].label == fm.row_meta[i].label);
    }
    CHECK(prep::norm_stats_hash(loaded.norm_stats) == prep::norm_stats_hash(fm.norm_stats));
    std::filesystem::remove(path);
}

TEST_CASE("channel mask restricts the feature blocks") {
    auto cfg = synth::small_config(12, 44);
    const auto corpus = synth::generate(cfg);
    PipelineConfig pc;
    pc.channel_mask = {3, 4};  // gyr_x, gyr_y
    const auto fm = prep::build_features(corpus, pc);
    CHECK(fm.cols() == 2 * 898);
    CHECK(fm.feature_layout.channels == std::vector<int>{3, 4});
}
