#include "acrosense/pipeline.hpp"

#include <algorithm>
#include <sstream>

namespace acrosense::pipeline {

namespace {

std::string join_ints(const std::vector<int>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    return out.str();
}

constexpr std::uint64_t kSplitTag = 0x5354;
constexpr std::uint64_t kSearchTag = 0x5243;
constexpr std::uint64_t kCvTag = 0x4356;
constexpr std::uint64_t kCurveTag = 0x4c43;
constexpr std::uint64_t kImportanceTag = 0x494d;

}  // namespace

std::vector<std::pair<std::string, std::string>> PipelineOptions::resolved() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("min_label_count", std::to_string(min_label_count));
    kv.emplace_back("holdout_athletes", std::to_string(holdout_athletes));
    kv.emplace_back("target_holdout", std::to_string(target_holdout));
    kv.emplace_back("features", feature_kind);
    kv.emplace_back("bins", std::to_string(bins));
    kv.emplace_back("raw_mode",
                    raw_mode == prep::ResampleMode::kInterpolate ? "interpolate" : "pad");
    kv.emplace_back("raw_target_length", std::to_string(raw_target_length));
    kv.emplace_back("channels", join_ints(channel_mask));
    kv.emplace_back("cv", eval::scheme_name(scheme));
    kv.emplace_back("folds", std::to_string(folds));
    kv.emplace_back("search_iters", std::to_string(search_iterations));
    kv.emplace_back("kernel_template", kernel_template);
    kv.emplace_back("curve_sizes", with_learning_curve ? join_ints(curve_sizes) : "off");
    kv.emplace_back("importance_repeats",
                    with_importance ? std::to_string(importance_repeats) : "off");
    kv.emplace_back("seed", std::to_string(seed));
    return kv;
}

PipelineResult run_pipeline(const data::Corpus& corpus, const PipelineOptions& options) {
    if (options.feature_kind != "spectra" && options.feature_kind != "raw") {
        throw ValidationError("pipeline: features must be 'spectra' or 'raw'");
    }

    PipelineResult result;

    const data::Corpus filtered =
        data::filter_rare_labels(corpus, options.min_label_count);
    result.split = data::make_split(filtered, options.holdout_athletes,
                                    options.target_holdout,
                                    mix_seed(options.seed, kSplitTag));

    prep::FeatureMatrix all_features;
    if (options.feature_kind == "spectra") {
        spectral::SpectrumConfig cfg;
        cfg.bins = options.bins;
        cfg.channel_mask = options.channel_mask;
        all_features = spectral::build_spectra_features(filtered, cfg,
                                                        result.split.train_ids);
    } else {
        prep::PipelineConfig cfg;
        cfg.mode = options.raw_mode;
        cfg.target_length = options.raw_target_length;
        cfg.channel_mask = options.channel_mask;
        // Padding needs room for the longest recording.
        if (cfg.mode == prep::ResampleMode::kPad) {
            std::size_t longest = 0;
            for (const auto& r : filtered.recordings) {
                longest = std::max(longest, r.length());
            }
            cfg.target_length =
                std::max(cfg.target_length, static_cast<int>(longest));
        }
        all_features = prep::build_features(filtered, cfg, result.split.train_ids);
    }

    result.train_features =
        all_features.select_rows(all_features.rows_for_ids(result.split.train_ids));
    result.holdout_features =
        all_features.select_rows(all_features.rows_for_ids(result.split.holdout_ids));
    if (result.holdout_features.rows() == 0) {
        throw ValidationError("pipeline: empty holdout partition");
    }

    eval::CvPlan plan;
    const std::uint64_t cv_seed = mix_seed(options.seed, kCvTag);
    if (options.scheme == eval::CvScheme::kKFold) {
        plan = eval::make_kfold(result.train_features.rows(), options.folds, cv_seed);
    } else {
        std::vector<std::string> labels, groups;
        for (const auto& m : result.train_features.row_meta) {
            labels.push_back(m.label);
            groups.push_back(m.athlete_id);
        }
        plan = eval::make_sgkf(labels, groups, options.folds, cv_seed);
    }

    eval::SearchSpace space;
    space.kernel_template = kernels::parse(options.kernel_template);
    space.iterations = options.search_iterations;
    space.seed = mix_seed(options.seed, kSearchTag);
    result.search = eval::random_search(result.train_features, space, plan);

    result.model = gp::fit(result.train_features, result.search.best_kernel);

    const auto predicted =
        gp::predict_labels(result.model, result.holdout_features.values);
    std::vector<std::string> truth;
    for (const auto& m : result.holdout_features.row_meta) truth.push_back(m.label);

    eval::EvalReport& report = result.report;
    report.scheme = eval::scheme_name(options.scheme);
    report.kernel = result.search.best_kernel;
    report.kernel_expression = kernels::print(result.search.best_kernel);
    report.cv_accuracy_mean = result.search.best_cv.mean_accuracy;
    report.cv_accuracy_std = result.search.best_cv.std_accuracy;
    report.label_order = result.model.label_order;
    report.confusion = eval::confusion_matrix(truth, predicted, report.label_order);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) ++hits;
    }
    report.holdout_accuracy =
        static_cast<double>(hits) / static_cast<double>(truth.size());

    if (options.with_learning_curve) {
        std::vector<int> sizes;
        for (int s : options.curve_sizes) {
            if (static_cast<std::size_t>(s) <= result.train_features.rows()) {
                sizes.push_back(s);
            }
        }
        if (!sizes.empty()) {
            report.curve = eval::learning_curve(
                result.train_features, result.holdout_features, result.search.best_kernel,
                sizes, options.scheme, options.folds, mix_seed(options.seed, kCurveTag));
        }
    }
    if (options.with_importance) {
        report.importance = eval::permutation_importance(
            result.model, result.holdout_features, options.importance_repeats,
            mix_seed(options.seed, kImportanceTag));
    }

    report.seed = options.seed;
    report.config = options.resolved();
    std::string config_blob;
    for (const auto& [k, v] : report.config) config_blob += k + "=" + v + ";";
    report.config_hash = hash_hex(fnv1a(config_blob));
    return result;
}

}  // namespace acrosense::pipeline
