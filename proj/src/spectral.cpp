#include "acrosense/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acrosense::spectral {

void SpectrumConfig::validate() const {
    if (bins < 2) throw ValidationError("SpectrumConfig: bins must be >= 2");
    prep::PipelineConfig probe;
    probe.channel_mask = channel_mask;
    probe.validate();
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft(std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) {
        throw ValidationError("fft: length must be a power of two, got " +
                              std::to_string(n));
    }
    // Bit-reversal permutation.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& z : data) z *= scale;
    }
}

std::vector<std::complex<double>> dft_bluestein(
    const std::vector<std::complex<double>>& data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0) throw ValidationError("dft_bluestein: empty input");
    if ((n & (n - 1)) == 0) {
        auto copy = data;
        fft(copy, inverse);
        return copy;
    }
    if (inverse) {
        // idft(x) = conj(dft(conj(x))) / n
        std::vector<std::complex<double>> conj_in(n);
        for (std::size_t i = 0; i < n; ++i) conj_in[i] = std::conj(data[i]);
        auto y = dft_bluestein(conj_in, false);
        for (auto& z : y) z = std::conj(z) / static_cast<double>(n);
        return y;
    }

    // Chirp angles use k^2 mod 2n in integer arithmetic to keep precision
    // for large indices.
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<std::complex<double>> a(m, {0.0, 0.0});
    std::vector<std::complex<double>> b(m, {0.0, 0.0});
    std::vector<std::complex<double>> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto q = static_cast<unsigned long long>(k) * k % (2ULL * n);
        const double ang = -M_PI * static_cast<double>(q) / static_cast<double>(n);
        chirp[k] = {std::cos(ang), std::sin(ang)};
        a[k] = data[k] * chirp[k];
        b[k] = std::conj(chirp[k]);
        if (k != 0) b[m - k] = std::conj(chirp[k]);
    }
    fft(a, false);
    fft(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft(a, true);
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    return out;
}

std::vector<double> power_spectrum(const std::vector<double>& channel,
                                   const SpectrumConfig& cfg) {
    const std::size_t t_len = channel.size();
    if (t_len < 2) throw ValidationError("power_spectrum: signal length must be >= 2");

    std::vector<double> x(channel);
    if (cfg.detrend == Detrend::kMeanRemoval) {
        const bool constant =
            std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        if (constant) return std::vector<double>(t_len / 2 + 1, 0.0);
        const double mean =
            std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(t_len);
        for (double& v : x) v -= mean;
    }

    const std::size_t n = next_pow2(2 * t_len - 1);
    std::vector<std::complex<double>> padded(n, {0.0, 0.0});
    for (std::size_t i = 0; i < t_len; ++i) padded[i] = {x[i], 0.0};
    fft(padded, false);
    for (auto& z : padded) z = {std::norm(z), 0.0};
    fft(padded, true);

    // Biased linear autocorrelation r[tau], tau = 0..T-1.
    std::vector<double> r(t_len);
    for (std::size_t tau = 0; tau < t_len; ++tau) {
        r[tau] = padded[tau].real() / static_cast<double>(t_len);
    }

    // The spectrum is the transform of the symmetric autocorrelation; wrap
    // the negative lags into a length-T sequence so bin k sits at frequency
    // k/T cycles per sample.
    std::vector<std::complex<double>> wrapped(t_len, {0.0, 0.0});
    wrapped[0] = {r[0], 0.0};
    for (std::size_t j = 1; j < t_len; ++j) {
        wrapped[j] = {r[j] + r[t_len - j], 0.0};
    }
    const auto spec = dft_bluestein(wrapped, false);

    std::vector<double> out(t_len / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::max(0.0, spec[k].real());
    }
    return out;
}

prep::FeatureMatrix build_spectra_features(const data::Corpus& corpus,
                                           const SpectrumConfig& cfg,
                                           const std::vector<std::string>& fit_rows) {
    cfg.validate();
    const std::size_t n = corpus.size();
    if (n == 0) throw ValidationError("build_spectra_features: empty corpus");
    const int blocks = static_cast<int>(cfg.channel_mask.size());

    prep::FeatureMatrix fm;
    fm.values.resize(static_cast<Eigen::Index>(n),
                     static_cast<Eigen::Index>(blocks) * cfg.bins);
    fm.row_meta.resize(n);
    fm.feature_layout.kind = "spectra";
    fm.feature_layout.block_size = cfg.bins;
    fm.feature_layout.channels = cfg.channel_mask;
    fm.feature_layout.detrend =
        cfg.detrend == Detrend::kMeanRemoval ? "mean_removal" : "none";
    fm.feature_layout.normalization = "per_channel_zscore";

    std::vector<std::string> errors(n);
    parallel::parallel_for(n, [&](std::size_t i) {
        try {
            const auto& rec = corpus.recordings[i];
            fm.row_meta[i] = {rec.id, rec.athlete_id, rec.label};
            for (int b = 0; b < blocks; ++b) {
                const auto& ch = rec.channels[static_cast<std::size_t>(cfg.channel_mask[b])];
                const auto spectrum = power_spectrum(ch, cfg);
                const auto binned = prep::resample_linear(spectrum, cfg.bins);
                for (int k = 0; k < cfg.bins; ++k) {
                    fm.values(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(b) * cfg.bins + k) =
                        binned[static_cast<std::size_t>(k)];
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

    std::vector<std::size_t> fit_idx;
    if (fit_rows.empty()) {
        fit_idx.resize(n);
        for (std::size_t i = 0; i < n; ++i) fit_idx[i] = i;
    } else {
        fit_idx = fm.rows_for_ids(fit_rows);
    }
    prep::fit_and_apply_zscore(fm, fit_idx);
    return fm;
}

}  // namespace acrosense::spectral
