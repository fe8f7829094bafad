#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "acrosense/core_data.hpp"

namespace acrosense::synth {

struct Harmonic {
    double freq_hz = 0.0;
    double amplitude = 0.0;
    double phase = 0.0;
};

struct ChannelTemplate {
    std::vector<Harmonic> harmonics;
    double offset = 0.0;
};

struct LabelTemplate {
    std::array<ChannelTemplate, data::kChannelCount> channels;
    double duration_mean = 360.0;   // samples
    double duration_spread = 0.18;  // lognormal sigma
};

struct AthleteEffects {
    double amplitude_sigma = 0.15;    // lognormal spread of per-athlete gain
    double channel_gain_sigma = 0.12; // per-athlete, per-channel gain spread
    double timewarp_sigma = 0.10;     // lognormal spread of per-athlete execution speed
    double tempo_jitter = 0.06;       // per-recording lognormal speed variation
    double phase_jitter = 1.0;        // fraction of (-pi, pi) drawn per recording
};

struct SynthConfig {
    int n_athletes = 16;
    double athlete_activity_sigma = 0.35; // lognormal spread of per-athlete volume
    std::vector<std::string> labels = {"BF", "BHS", "BL", "BT", "FW", "RO"};
    int n_recordings = 1102;
    int duration_min = 180;
    int duration_max = 720;
    double sample_rate_hz = 120.0;
    std::map<std::string, LabelTemplate> templates;   // empty => defaults
    std::vector<double> label_weights;                // empty => defaults
    AthleteEffects athlete;
    double noise_std = 0.30;            // relative to per-channel amplitude
    double confusable_coupling = 0.45;  // pulls the BL/BT templates together
    double idle_margin_max = 0.08;      // fraction of duration idle at each end
    std::uint64_t seed = 1;

    void validate() const;
};

/// Built-in per-label templates (rotation content concentrated in gyr_x /
/// gyr_y and vertical acceleration, weak magnetometer signal).
std::map<std::string, LabelTemplate> default_templates(double confusable_coupling);

/// Config where only the given canonical channel carries label-dependent
/// signal; every other channel is identical across labels.
SynthConfig planted_channel_config(int channel, int n_athletes = 6,
                                   int n_recordings = 120, std::uint64_t seed = 1);

/// Compact config for fast tests.
SynthConfig small_config(int n_recordings, std::uint64_t seed);

/// Deterministic pseudo-IMU corpus: per-label harmonic templates modulated by
/// athlete gain / time warp, per-recording phase, Hann window with idle
/// margins, and Gaussian noise.
data::Corpus generate(const SynthConfig& config);

/// JSON (de)serialization of the config for the CLI.
SynthConfig config_from_json(const std::string& json_text);
std::string config_to_json(const SynthConfig& config);

}  // namespace acrosense::synth
