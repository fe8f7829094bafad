#pragma once

#include <string>
#include <vector>

#include "acrosense/core_data.hpp"
#include "acrosense/feature_matrix.hpp"

namespace acrosense::prep {

enum class ResampleMode { kPad, kInterpolate };
enum class Normalization { kPerChannelZscore, kNone };

struct PipelineConfig {
    ResampleMode mode = ResampleMode::kInterpolate;
    int target_length = 898;
    Normalization normalization = Normalization::kPerChannelZscore;
    std::vector<int> channel_mask = {0, 1, 2, 3, 4, 5, 6, 7, 8};

    void validate() const;
};

/// Piecewise-linear resampling onto target_length points at parameter
/// positions k*(T-1)/(target_length-1). Endpoints are preserved exactly.
std::vector<double> resample_linear(const std::vector<double>& channel,
                                    int target_length);

/// Copy the input and append trailing zeros up to target_length.
std::vector<double> pad_zeros(const std::vector<double>& channel, int target_length);

/// Fixed-size raw time-domain features: each masked channel resampled/padded
/// to cfg.target_length, z-scored per channel with statistics fit on fit_rows
/// (recording ids), concatenated channel-major. fit_rows empty => fit on all.
FeatureMatrix build_features(const data::Corpus& corpus, const PipelineConfig& cfg,
                             const std::vector<std::string>& fit_rows = {});

/// Shared z-score plumbing (also used by the spectral featurizer): fit
/// per-channel-block mean/std over the fit row indices, then standardize all
/// rows in place. Zero-variance blocks map to all-zeros and get flagged.
void fit_and_apply_zscore(FeatureMatrix& fm, const std::vector<std::size_t>& fit_idx);

}  // namespace acrosense::prep
