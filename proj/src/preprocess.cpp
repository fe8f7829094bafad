#include "acrosense/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace acrosense::prep {

void PipelineConfig::validate() const {
    if (target_length < 2) throw ValidationError("target_length must be >= 2");
    if (channel_mask.empty()) throw ValidationError("channel mask must be non-empty");
    std::set<int> seen;
    for (int c : channel_mask) {
        if (c < 0 || c >= data::kChannelCount) {
            throw ValidationError("channel mask index out of range: " + std::to_string(c));
        }
        if (!seen.insert(c).second) {
            throw ValidationError("channel mask has duplicate index " + std::to_string(c));
        }
    }
    if (!std::is_sorted(channel_mask.begin(), channel_mask.end())) {
        throw ValidationError("channel mask must be ascending");
    }
}

std::vector<double> resample_linear(const std::vector<double>& channel,
                                    int target_length) {
    const std::size_t n = channel.size();
    if (n < 2) throw ValidationError("resample_linear: input length must be >= 2");
    if (target_length < 1) throw ValidationError("resample_linear: target must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(target_length));
    if (target_length == 1) {
        out[0] = channel[0];
        return out;
    }
    const double scale = static_cast<double>(n - 1) / (target_length - 1);
    for (int k = 0; k < target_length; ++k) {
        const double pos = k * scale;
        auto i = static_cast<std::size_t>(pos);
        if (i >= n - 1) {
            out[k] = channel[n - 1];  // endpoint exact, no extrapolation
            continue;
        }
        const double frac = pos - static_cast<double>(i);
        out[k] = channel[i] + frac * (channel[i + 1] - channel[i]);
    }
    out[0] = channel[0];
    out[static_cast<std::size_t>(target_length) - 1] = channel[n - 1];
    return out;
}

std::vector<double> pad_zeros(const std::vector<double>& channel, int target_length) {
    if (target_length < 0) throw ValidationError("pad_zeros: negative target");
    if (channel.size() > static_cast<std::size_t>(target_length)) {
        throw ValidationError("pad_zeros: input longer than target (" +
                              std::to_string(channel.size()) + " > " +
                              std::to_string(target_length) + ")");
    }
    std::vector<double> out(channel);
    out.resize(static_cast<std::size_t>(target_length), 0.0);
    return out;
}

void fit_and_apply_zscore(FeatureMatrix& fm, const std::vector<std::size_t>& fit_idx) {
    const int n_blocks = static_cast<int>(fm.feature_layout.channels.size());
    fm.norm_stats.assign(static_cast<std::size_t>(n_blocks), ChannelStats{});
    if (fit_idx.empty()) throw ValidationError("zscore: no fit rows");

    for (int b = 0; b < n_blocks; ++b) {
        const auto [lo, hi] = fm.block_range(b);
        const Eigen::Index width = hi - lo;
        double sum = 0.0, sq = 0.0;
        const auto count = static_cast<double>(fit_idx.size() * width);
        for (std::size_t r : fit_idx) {
            const auto row = fm.values.row(static_cast<Eigen::Index>(r));
            sum += row.segment(lo, width).sum();
            sq += row.segment(lo, width).squaredNorm();
        }
        const double mean = sum / count;
        const double var = std::max(0.0, sq / count - mean * mean);
        const double sd = std::sqrt(var);
        ChannelStats& st = fm.norm_stats[static_cast<std::size_t>(b)];
        st.mean = mean;
        if (sd < 1e-300) {
            st.stddev = 1.0;
            st.zero_variance = true;
            fm.values.middleCols(lo, width).setZero();
        } else {
            st.stddev = sd;
            fm.values.middleCols(lo, width) =
                (fm.values.middleCols(lo, width).array() - mean) / sd;
        }
    }
}

FeatureMatrix build_features(const data::Corpus& corpus, const PipelineConfig& cfg,
                             const std::vector<std::string>& fit_rows) {
    cfg.validate();
    const std::size_t n = corpus.size();
    if (n == 0) throw ValidationError("build_features: empty corpus");
    const int blocks = static_cast<int>(cfg.channel_mask.size());
    const Eigen::Index d = static_cast<Eigen::Index>(blocks) * cfg.target_length;

    FeatureMatrix fm;
    fm.values.resize(static_cast<Eigen::Index>(n), d);
    fm.row_meta.resize(n);
    fm.feature_layout.kind = "raw";
    fm.feature_layout.block_size = cfg.target_length;
    fm.feature_layout.channels = cfg.channel_mask;
    fm.feature_layout.detrend = "";
    fm.feature_layout.normalization =
        cfg.normalization == Normalization::kPerChannelZscore ? "per_channel_zscore"
                                                              : "none";

    std::vector<std::string> errors(n);
    parallel::parallel_for(n, [&](std::size_t i) {
        try {
            const auto& rec = corpus.recordings[i];
            fm.row_meta[i] = {rec.id, rec.athlete_id, rec.label};
            for (int b = 0; b < blocks; ++b) {
                const auto& ch = rec.channels[static_cast<std::size_t>(cfg.channel_mask[b])];
                const std::vector<double> v = cfg.mode == ResampleMode::kInterpolate
                                                  ? resample_linear(ch, cfg.target_length)
                                                  : pad_zeros(ch, cfg.target_length);
                for (int k = 0; k < cfg.target_length; ++k) {
                    fm.values(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(b) * cfg.target_length + k) =
                        v[static_cast<std::size_t>(k)];
                }
            }
        } catch (const std::exception& e) {
            errors[i] = std::string("recording '") + corpus.recordings[i].id + "': " +
                        e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw ValidationError(e);
    }

    if (cfg.normalization == Normalization::kPerChannelZscore) {
        std::vector<std::size_t> fit_idx;
        if (fit_rows.empty()) {
            fit_idx.resize(n);
            for (std::size_t i = 0; i < n; ++i) fit_idx[i] = i;
        } else {
            fit_idx = fm.rows_for_ids(fit_rows);
        }
        fit_and_apply_zscore(fm, fit_idx);
    } else {
        fm.norm_stats.assign(static_cast<std::size_t>(blocks), ChannelStats{});
    }
    return fm;
}

}  // namespace acrosense::prep
