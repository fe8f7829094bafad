#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "acrosense/core_data.hpp"
#include "acrosense/evaluation.hpp"
#include "acrosense/gp.hpp"
#include "acrosense/preprocess.hpp"
#include "acrosense/spectral.hpp"

namespace acrosense::pipeline {

struct PipelineOptions {
    int min_label_count = 10;
    int holdout_athletes = 4;
    int target_holdout = 254;

    std::string feature_kind = "spectra";  // "spectra" | "raw"
    int bins = 1000;
    prep::ResampleMode raw_mode = prep::ResampleMode::kInterpolate;
    int raw_target_length = 898;
    std::vector<int> channel_mask = {0, 1, 2, 3, 4, 5, 6, 7, 8};

    eval::CvScheme scheme = eval::CvScheme::kStratifiedGroupKFold;
    int folds = 5;
    int search_iterations = 10;
    std::string kernel_template = "C(1.0)*RQ(l=1.0,a=1.0)";

    bool with_learning_curve = true;
    std::vector<int> curve_sizes = {100, 200, 400, 600};
    bool with_importance = true;
    int importance_repeats = 10;

    std::uint64_t seed = 0;

    /// Resolved key/value view used for the report stamp and config hash.
    std::vector<std::pair<std::string, std::string>> resolved() const;
};

struct PipelineResult {
    data::SplitPlan split;
    eval::SearchResult search;
    gp::TrainedModel model;
    prep::FeatureMatrix train_features;
    prep::FeatureMatrix holdout_features;
    eval::EvalReport report;
};

/// The full chain: rare-label filter -> athlete-disjoint split -> featurize
/// (statistics fit on the training side) -> randomized kernel search with the
/// chosen CV scheme -> refit on all training rows -> holdout evaluation,
/// learning curve and permutation importance into one EvalReport.
PipelineResult run_pipeline(const data::Corpus& corpus, const PipelineOptions& options);

}  // namespace acrosense::pipeline
