#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "acrosense/common.hpp"
#include "acrosense/spectral.hpp"
#include "acrosense/synthgen.hpp"

using namespace acrosense;
using spectral::SpectrumConfig;

namespace {

// Independent O(N^2) DFT used as the oracle throughout this file.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                            bool inverse) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = sign * 2.0 * M_PI * static_cast<double>(k) *
                               static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

// Direct periodogram on the length-T grid: |DFT_T(x)|^2 / T, non-negative bins.
std::vector<double> naive_periodogram(const std::vector<double>& x) {
    const std::size_t t_len = x.size();
    std::vector<std::complex<double>> cx(t_len);
    for (std::size_t i = 0; i < t_len; ++i) cx[i] = {x[i], 0.0};
    const auto spec = naive_dft(cx, false);
    std::vector<double> out(t_len / 2 + 1);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::norm(spec[k]) / static_cast<double>(t_len);
    }
    return out;
}

std::vector<double> random_signal(Rng& rng, std::size_t n) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
}

double max_abs(const std::vector<std::complex<double>>& a,
               const std::vector<std::complex<double>>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("fft impulse gives a flat spectrum") {
    std::vector<std::complex<double>> x = {{1, 0}, {0, 0}, {0, 0}, {0, 0}};
    spectral::fft(x, false);
    for (const auto& v : x) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(v.imag() == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("fft of a constant concentrates in the DC bin") {
    const std::size_t n = 16;
    const double c = 2.5;
    std::vector<std::complex<double>> x(n, {c, 0.0});
    spectral::fft(x, false);
    CHECK(std::abs(x[0] - std::complex<double>(n * c, 0.0)) < 1e-12);
    for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(x[k]) < 1e-12);
}

TEST_CASE("fft matches the naive DFT oracle on power-of-two lengths") {
    Rng rng(42);
    for (std::size_t n = 4; n <= 256; n *= 2) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        auto got = x;
        spectral::fft(got, false);
        const auto want = naive_dft(x, false);
        CHECK(max_abs(got, want) < 1e-10);

        auto back = got;
        spectral::fft(back, true);
        CHECK(max_abs(back, x) < 1e-12);
    }
}

TEST_CASE("fft round trip is identity within 1e-12 relative") {
    Rng rng(7);
    std::vector<std::complex<double>> x(64);
    double scale = 0.0;
    for (auto& v : x) {
        v = {rng.uniform(-10.0, 10.0), rng.uniform(-10.0, 10.0)};
        scale = std::max(scale, std::abs(v));
    }
    auto y = x;
    spectral::fft(y, false);
    spectral::fft(y, true);
    CHECK(max_abs(y, x) / scale < 1e-12);
}

TEST_CASE("fft rejects non-power-of-two lengths") {
    std::vector<std::complex<double>> x(6, {1.0, 0.0});
    CHECK_THROWS_AS(spectral::fft(x, false), ValidationError);
}

TEST_CASE("Parseval holds on the padded transform") {
    Rng rng(11);
    for (std::size_t n : {8u, 64u, 256u}) {
        std::vector<std::complex<double>> x(n);
        double time_energy = 0.0;
        for (auto& v : x) {
            v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
            time_energy += std::norm(v);
        }
        auto y = x;
        spectral::fft(y, false);
        double freq_energy = 0.0;
        for (const auto& v : y) freq_energy += std::norm(v);
        CHECK(std::abs(freq_energy - n * time_energy) / (n * time_energy) < 1e-9);
    }
}

TEST_CASE("bluestein DFT matches the naive oracle on awkward lengths") {
    Rng rng(13);
    for (std::size_t n : {3u, 5u, 7u, 12u, 50u, 137u, 251u}) {
        std::vector<std::complex<double>> x(n);
        for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto got = spectral::dft_bluestein(x, false);
        const auto want = naive_dft(x, false);
        CHECK(max_abs(got, want) < 1e-9);

        const auto back = spectral::dft_bluestein(got, true);
        CHECK(max_abs(back, x) < 1e-9);
    }
}

TEST_CASE("power spectrum of a constant signal is all zero under mean removal") {
    SpectrumConfig cfg;
    const std::vector<double> x(100, 3.7);
    const auto spec = spectral::power_spectrum(x, cfg);
    REQUIRE(spec.size() == 51);
    for (double v : spec) CHECK(v == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("power spectrum peaks at the sinusoid's cycle count") {
    SpectrumConfig cfg;
    const std::size_t t_len = 256;
    std::vector<double> x(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        x[t] = std::sin(2.0 * M_PI * 8.0 * static_cast<double>(t) /
                        static_cast<double>(t_len));
    }
    const auto spec = spectral::power_spectrum(x, cfg);

    // Oracle: peak bin of the direct periodogram of the detrended signal.
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(t_len);
    auto detrended = x;
    for (double& v : detrended) v -= mean;
    const auto oracle = naive_periodogram(detrended);

    std::size_t got_peak = 0, want_peak = 0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (spec[k] > spec[got_peak]) got_peak = k;
        if (oracle[k] > oracle[want_peak]) want_peak = k;
    }
    CHECK(got_peak == 8);
    CHECK(want_peak == got_peak);
}

TEST_CASE("Wiener-Khinchin: autocorrelation route equals the direct periodogram") {
    Rng rng(2024);
    SpectrumConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t t_len = 50 + rng.below(451);
        auto x = random_signal(rng, t_len);
        const auto got = spectral::power_spectrum(x, cfg);

        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= static_cast<double>(t_len);
        for (double& v : x) v -= mean;
        const auto want = naive_periodogram(x);

        REQUIRE(got.size() == want.size());
        double ref = 0.0;
        for (double v : want) ref = std::max(ref, v);
        for (std::size_t k = 0; k < got.size(); ++k) {
            CHECK(std::abs(got[k] - want[k]) <= 1e-9 * std::max(ref, 1.0));
        }
    }
}

TEST_CASE("power spectrum ignores circular time shifts") {
    Rng rng(5);
    SpectrumConfig cfg;
    const std::size_t t_len = 240;
    const auto x = random_signal(rng, t_len);
    const auto base = spectral::power_spectrum(x, cfg);
    double ref = 0.0;
    for (double v : base) ref = std::max(ref, v);

    for (std::size_t shift : {17u, 120u, 233u}) {
        std::vector<double> shifted(t_len);
        for (std::size_t t = 0; t < t_len; ++t) shifted[t] = x[(t + shift) % t_len];
        const auto spec = spectral::power_spectrum(shifted, cfg);
        for (std::size_t k = 0; k < spec.size(); ++k) {
            CHECK(std::abs(spec[k] - base[k]) <= 1e-9 * std::max(ref, 1.0));
        }
    }
}

TEST_CASE("power spectrum scales with the square of the amplitude") {
    Rng rng(6);
    SpectrumConfig cfg;
    const auto x = random_signal(rng, 137);
    const double a = 3.25;
    auto scaled = x;
    for (double& v : scaled) v *= a;
    const auto base = spectral::power_spectrum(x, cfg);
    const auto spec = spectral::power_spectrum(scaled, cfg);
    double ref = 0.0;
    for (double v : base) ref = std::max(ref, v);
    for (std::size_t k = 0; k < base.size(); ++k) {
        CHECK(std::abs(spec[k] - a * a * base[k]) <= 1e-10 * a * a * std::max(ref, 1.0));
    }
}

TEST_CASE("power spectrum rejects signals shorter than two samples") {
    SpectrumConfig cfg;
    CHECK_THROWS_AS(spectral::power_spectrum({1.0}, cfg), ValidationError);
}

TEST_CASE("spectra feature rows have 9 x bins columns") {
    auto cfg = synth::small_config(24, 3);
    const auto corpus = synth::generate(cfg);
    SpectrumConfig scfg;
    scfg.bins = 1000;
    const auto fm = spectral::build_spectra_features(corpus, scfg);
    CHECK(fm.cols() == 9000);
    CHECK(fm.rows() == 24);
    CHECK(fm.feature_layout.kind == "spectra");
    for (Eigen::Index r = 0; r < fm.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
            CHECK(std::isfinite(fm.values(r, c)));
        }
    }
}

TEST_CASE("all-constant channels give all-zero spectra before normalization") {
    SpectrumConfig cfg;
    const std::vector<double> flat(300, 9.81);
    const auto spec = spectral::power_spectrum(flat, cfg);
    const auto binned = prep::resample_linear(spec, cfg.bins);
    for (double v : binned) CHECK(v == 0.0);
}

TEST_CASE("a planted channel frequency dominates that channel's block") {
    // One channel carries a strong tone, everything else is quiet noise.
    Rng rng(77);
    data::Recording rec;
    rec.id = "r0";
    rec.athlete_id = "a0";
    rec.label = "X";
    rec.sample_rate_hz = 120.0;
    const std::size_t t_len = 400;
    for (int c = 0; c < 9; ++c) {
        rec.channels[c].resize(t_len);
        for (std::size_t t = 0; t < t_len; ++t) {
            double v = 0.01 * rng.normal();
            if (c == 3) {
                v += 10.0 * std::sin(2.0 * M_PI * 6.0 * static_cast<double>(t) / 120.0);
            }
            rec.channels[c][t] = v;
        }
    }
    SpectrumConfig cfg;
    double best_mass = -1.0;
    int best_channel = -1;
    for (int c = 0; c < 9; ++c) {
        const auto spec = spectral::power_spectrum(rec.channels[c], cfg);
        const auto binned = prep::resample_linear(spec, cfg.bins);
        double mass = 0.0;
        for (double v : binned) mass += v;
        if (mass > best_mass) {
            best_mass = mass;
            best_channel = c;
        }
    }
    CHECK(best_channel == 3);
}
