#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "acrosense/evaluation.hpp"

namespace acrosense::svg {

/// 2-D scatter colored by cluster index (PCA exploration plot).
void write_scatter(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<int>& cluster, const std::string& title,
                   const std::filesystem::path& path);

/// Learning curves as mean lines with +-1 std bands, one series per scheme.
struct CurveSeries {
    std::string name;
    std::vector<eval::CurvePoint> points;
};
void write_learning_curve(const std::vector<CurveSeries>& series,
                          const std::filesystem::path& path);

/// Horizontal bar chart of per-channel importance (mean drop, std whisker).
void write_importance_bars(const std::vector<eval::ChannelImportance>& importance,
                           const std::filesystem::path& path);

}  // namespace acrosense::svg
