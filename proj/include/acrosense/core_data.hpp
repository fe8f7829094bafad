#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "acrosense/common.hpp"

namespace acrosense::data {

inline constexpr int kChannelCount = 9;

/// Canonical channel order for every matrix, mask and report.
extern const std::array<std::string, kChannelCount> kChannelNames;

/// One tumbling attempt captured by a single 9-channel IMU.
struct Recording {
    std::string id;
    std::string athlete_id;
    std::string label;
    double sample_rate_hz = 0.0;
    std::array<std::vector<double>, kChannelCount> channels;

    std::size_t length() const { return channels[0].size(); }
    void validate() const;  // throws ValidationError on broken invariants
};

struct Corpus {
    std::vector<Recording> recordings;
    std::vector<std::string> label_set;    // sorted distinct
    std::vector<std::string> athlete_set;  // sorted distinct

    std::size_t size() const { return recordings.size(); }
    /// Recompute label_set/athlete_set from recordings and check id uniqueness.
    void rebuild_index();
};

/// Athlete-disjoint train/holdout partition, by recording id.
struct SplitPlan {
    std::vector<std::string> train_ids;
    std::vector<std::string> holdout_ids;
    std::vector<std::string> holdout_athletes;
};

/// Read a manifest (JSON array of {id, athlete_id, label, sample_rate_hz, path})
/// and every referenced recording CSV. Relative paths resolve against the
/// manifest's directory. Recordings keep manifest order.
Corpus load_corpus(const std::filesystem::path& manifest_path);

/// Write manifest.json plus one CSV per recording into dir (created if needed).
/// Inverse of load_corpus; output bytes are deterministic.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);

/// Keep only recordings whose label occurs at least min_count times.
Corpus filter_rare_labels(const Corpus& corpus, int min_count = 10);

/// Choose holdout_athlete_count athletes (seeded randomized subset search over
/// at most 10,000 candidates) whose combined recording count is closest to
/// target_holdout_size, subject to every label keeping at least one training
/// recording. holdout_athlete_count == 0 yields an empty holdout.
SplitPlan make_split(const Corpus& corpus, int holdout_athlete_count,
                     int target_holdout_size, std::uint64_t seed);

}  // namespace acrosense::data
