#pragma once

#include <complex>
#include <vector>

#include "acrosense/core_data.hpp"
#include "acrosense/feature_matrix.hpp"
#include "acrosense/preprocess.hpp"

namespace acrosense::spectral {

enum class Detrend { kMeanRemoval, kNone };

struct SpectrumConfig {
    int bins = 1000;
    Detrend detrend = Detrend::kMeanRemoval;
    std::vector<int> channel_mask = {0, 1, 2, 3, 4, 5, 6, 7, 8};

    void validate() const;
};

/// In-place radix-2 FFT. Forward: X[k] = sum_t x[t] exp(-2*pi*i*k*t/N);
/// inverse applies the conjugate transform and the 1/N factor.
/// Length must be a power of two.
void fft(std::vector<std::complex<double>>& data, bool inverse);

/// DFT of arbitrary length via the Bluestein chirp-z decomposition (built on
/// the radix-2 fft above). Same sign/scale conventions as fft().
std::vector<std::complex<double>> dft_bluestein(
    const std::vector<std::complex<double>>& data, bool inverse);

/// Autocorrelation power spectrum (Wiener-Khinchin route):
///   1. remove the mean (if configured),
///   2. zero-pad to the smallest power of two >= 2T-1 and FFT,
///   3. inverse-FFT |X|^2 to get the linear autocorrelation, biased by 1/T,
///   4. wrap the two-sided lags into a length-T sequence and transform back.
/// Returns the floor(T/2)+1 non-negative-frequency bins (bin k <-> frequency
/// k/T cycles per sample), clipped at zero.
std::vector<double> power_spectrum(const std::vector<double>& channel,
                                   const SpectrumConfig& cfg);

/// Spectral feature matrix: per masked channel, power_spectrum on the
/// original-length signal, resampled to cfg.bins, then per-channel z-score
/// fit on fit_rows (ids). D = |mask| * bins.
prep::FeatureMatrix build_spectra_features(const data::Corpus& corpus,
                                           const SpectrumConfig& cfg,
                                           const std::vector<std::string>& fit_rows = {});

std::size_t next_pow2(std::size_t n);

}  // namespace acrosense::spectral
