#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acrosense/common.hpp"

namespace acrosense::prep {

struct RowMeta {
    std::string id;
    std::string athlete_id;
    std::string label;
};

struct ChannelStats {
    double mean = 0.0;
    double stddev = 1.0;
    bool zero_variance = false;
};

/// How the feature columns map back to sensor channels: contiguous
/// channel-major blocks of block_size columns each, in kChannelNames order
/// restricted to `channels`.
struct FeatureLayout {
    std::string kind;                // "raw" or "spectra"
    int block_size = 0;              // columns per channel
    std::vector<int> channels;       // channel indices present, ascending
    std::string detrend;             // spectra only: "mean_removal" or "none"
    std::string normalization;       // "per_channel_zscore" or "none"
};

struct FeatureMatrix {
    Eigen::MatrixXd values;              // N x D
    std::vector<RowMeta> row_meta;       // size N
    FeatureLayout feature_layout;
    std::vector<ChannelStats> norm_stats;  // one per entry of layout.channels

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

    /// Column range [begin, end) of the i-th channel block.
    std::pair<int, int> block_range(int block_index) const;

    /// Sorted distinct labels over row_meta.
    std::vector<std::string> label_set() const;

    /// New matrix restricted to the given row indices (meta carried along).
    FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const;

    /// Row indices whose meta id appears in `ids` (order of `ids` ignored;
    /// result in row order). Throws if an id is missing.
    std::vector<std::size_t> rows_for_ids(const std::vector<std::string>& ids) const;
};

/// Stable hash of normalization statistics; used to detect feeding a model
/// features normalized with the wrong statistics.
std::uint64_t norm_stats_hash(const std::vector<ChannelStats>& stats);

/// Binary container: "ACF1", u32 rows, u32 cols (LE), row-major f64 payload,
/// JSON trailer with row_meta / feature_layout / norm_stats and an optional
/// caller-supplied "extra" object (config stamp, split record).
void save_features(const FeatureMatrix& fm, const std::filesystem::path& path,
                   const std::string& extra_json = "");
FeatureMatrix load_features(const std::filesystem::path& path,
                            std::string* extra_json = nullptr);

/// Debug CSV export: header id,athlete_id,label,f0..fD-1.
void export_features_csv(const FeatureMatrix& fm, const std::filesystem::path& path);

}  // namespace acrosense::prep
