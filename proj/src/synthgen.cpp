#include "acrosense/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace acrosense::synth {

namespace {

constexpr int kAccX = 0, kAccY = 1, kAccZ = 2;
constexpr int kGyrX = 3, kGyrY = 4, kGyrZ = 5;
constexpr int kMagX = 6, kMagY = 7, kMagZ = 8;

ChannelTemplate ch(std::vector<Harmonic> harmonics, double offset = 0.0) {
    ChannelTemplate t;
    t.harmonics = std::move(harmonics);
    t.offset = offset;
    return t;
}

LabelTemplate base_label(double f, double dur_mean) {
    // Shared scaffold: dominant flip rotation in gyr_x, vertical acceleration
    // bursts in acc_z, weak magnetometer wobble around realistic offsets.
    LabelTemplate t;
    t.duration_mean = dur_mean;
    t.channels[kMagX] = ch({{f, 2.0, 0.3}}, 28.0);
    t.channels[kMagY] = ch({{f, 1.5, 1.1}}, -12.0);
    t.channels[kMagZ] = ch({{f, 1.0, 2.0}}, 40.0);
    return t;
}

void couple_pair(LabelTemplate& a, LabelTemplate& b, double gamma) {
    // Move both templates toward their midpoint; gamma = 1 makes them equal.
    const double s = 0.5 * gamma;
    for (int c = 0; c < data::kChannelCount; ++c) {
        auto& ha = a.channels[c].harmonics;
        auto& hb = b.channels[c].harmonics;
        const std::size_t m = std::min(ha.size(), hb.size());
        for (std::size_t i = 0; i < m; ++i) {
            const double fa = ha[i].freq_hz, fb = hb[i].freq_hz;
            const double aa = ha[i].amplitude, ab = hb[i].amplitude;
            ha[i].freq_hz = fa + s * (fb - fa);
            hb[i].freq_hz = fb + s * (fa - fb);
            ha[i].amplitude = aa + s * (ab - aa);
            hb[i].amplitude = ab + s * (aa - ab);
        }
    }
    const double da = a.duration_mean, db = b.duration_mean;
    a.duration_mean = da + s * (db - da);
    b.duration_mean = db + s * (da - db);
}

}  // namespace

std::map<std::string, LabelTemplate> default_templates(double confusable_coupling) {
    std::map<std::string, LabelTemplate> t;

    {  // Back Full: flip plus a full twist at double rate.
        LabelTemplate l = base_label(3.2, 300.0);
        l.channels[kGyrX] = ch({{3.2, 160.0, 0.0}, {6.4, 40.0, 0.7}});
        l.channels[kGyrY] = ch({{6.4, 120.0, 0.2}, {3.2, 30.0, 1.3}});
        l.channels[kGyrZ] = ch({{3.2, 25.0, 0.5}});
        l.channels[kAccZ] = ch({{6.4, 18.0, 0.0}, {3.2, 10.0, 0.9}}, 9.81);
        l.channels[kAccX] = ch({{3.2, 6.0, 0.4}});
        l.channels[kAccY] = ch({{6.4, 5.0, 1.6}});
        t["BF"] = l;
    }
    {  // Back Handspring: slower flip with a pronounced double impact.
        LabelTemplate l = base_label(2.2, 260.0);
        l.channels[kGyrX] = ch({{2.2, 140.0, 0.0}, {4.4, 60.0, 0.8}});
        l.channels[kGyrY] = ch({{2.2, 15.0, 0.3}});
        l.channels[kGyrZ] = ch({{2.2, 10.0, 1.0}});
        l.channels[kAccZ] = ch({{4.4, 22.0, 0.0}, {2.2, 12.0, 0.5}}, 9.81);
        l.channels[kAccX] = ch({{2.2, 8.0, 0.2}});
        l.channels[kAccY] = ch({{4.4, 3.0, 1.2}});
        t["BHS"] = l;
    }
    {  // Back Layout.
        LabelTemplate l = base_label(2.8, 320.0);
        l.channels[kGyrX] = ch({{2.8, 150.0, 0.0}, {5.6, 30.0, 0.6}});
        l.channels[kGyrY] = ch({{2.8, 20.0, 0.4}});
        l.channels[kGyrZ] = ch({{2.8, 8.0, 0.9}});
        l.channels[kAccZ] = ch({{2.8, 14.0, 0.1}, {5.6, 8.0, 0.7}}, 9.81);
        l.channels[kAccX] = ch({{2.8, 5.0, 0.3}});
        l.channels[kAccY] = ch({{2.8, 3.0, 1.5}});
        t["BL"] = l;
    }
    {  // Back Tuck: same family as BL, deliberately confusable.
        LabelTemplate l = base_label(3.4, 340.0);
        l.channels[kGyrX] = ch({{3.4, 155.0, 0.0}, {6.8, 28.0, 0.6}});
        l.channels[kGyrY] = ch({{3.4, 22.0, 0.4}});
        l.channels[kGyrZ] = ch({{3.4, 9.0, 0.9}});
        l.channels[kAccZ] = ch({{3.4, 15.0, 0.1}, {6.8, 9.0, 0.7}}, 9.81);
        l.channels[kAccX] = ch({{3.4, 5.0, 0.3}});
        l.channels[kAccY] = ch({{3.4, 3.0, 1.5}});
        t["BT"] = l;
    }
    {  // Front Walkover: slow forward rotation.
        LabelTemplate l = base_label(1.8, 520.0);
        l.channels[kGyrX] = ch({{1.8, -110.0, 0.0}, {3.6, 25.0, 0.5}});
        l.channels[kGyrY] = ch({{1.8, 12.0, 0.2}});
        l.channels[kGyrZ] = ch({{1.8, 6.0, 0.8}});
        l.channels[kAccZ] = ch({{1.8, 9.0, 0.0}, {3.6, 6.0, 0.4}}, 9.81);
        l.channels[kAccX] = ch({{1.8, 7.0, 0.6}});
        l.channels[kAccY] = ch({{1.8, 2.0, 1.1}});
        t["FW"] = l;
    }
    {  // Round Off: sideways rotation with strong longitudinal content.
        LabelTemplate l = base_label(2.6, 420.0);
        l.channels[kGyrX] = ch({{2.6, 90.0, 0.0}, {5.2, 20.0, 0.3}});
        l.channels[kGyrY] = ch({{2.6, 70.0, 0.5}, {5.2, 15.0, 1.0}});
        l.channels[kGyrZ] = ch({{5.2, 40.0, 0.2}});
        l.channels[kAccZ] = ch({{2.6, 12.0, 0.1}, {5.2, 7.0, 0.8}}, 9.81);
        l.channels[kAccX] = ch({{2.6, 6.0, 0.4}});
        l.channels[kAccY] = ch({{2.6, 8.0, 1.3}});
        t["RO"] = l;
    }

    if (confusable_coupling > 0.0) couple_pair(t["BL"], t["BT"], confusable_coupling);
    return t;
}

void SynthConfig::validate() const {
    if (n_athletes < 2) throw ValidationError("synth: need at least 2 athletes");
    if (labels.size() < 2) throw ValidationError("synth: need at least 2 labels");
    if (n_recordings < 2 * static_cast<int>(labels.size())) {
        throw ValidationError("synth: need at least 2 recordings per label");
    }
    if (duration_min < 2 || duration_max < duration_min) {
        throw ValidationError("synth: invalid duration range");
    }
    if (!(sample_rate_hz > 0.0)) throw ValidationError("synth: sample rate must be > 0");
    if (!label_weights.empty() && label_weights.size() != labels.size()) {
        throw ValidationError("synth: label_weights length mismatch");
    }
    for (double w : label_weights) {
        if (!(w > 0.0)) throw ValidationError("synth: label weights must be positive");
    }
    if (noise_std < 0.0) throw ValidationError("synth: noise_std must be >= 0");
    if (athlete_activity_sigma < 0.0) {
        throw ValidationError("synth: athlete_activity_sigma must be >= 0");
    }
    if (confusable_coupling < 0.0 || confusable_coupling > 1.0) {
        throw ValidationError("synth: confusable_coupling must be in [0,1]");
    }
    if (idle_margin_max < 0.0 || idle_margin_max > 0.4) {
        throw ValidationError("synth: idle_margin_max must be in [0, 0.4]");
    }
    if (!(athlete.amplitude_sigma >= 0.0) || !(athlete.channel_gain_sigma >= 0.0) ||
        !(athlete.timewarp_sigma >= 0.0) || !(athlete.tempo_jitter >= 0.0) ||
        athlete.phase_jitter < 0.0 || athlete.phase_jitter > 1.0) {
        throw ValidationError("synth: invalid athlete effects");
    }
}

namespace {

std::string athlete_name(int i) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "a%02d", i);
    return buf;
}

std::string recording_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "rec_%04d", i);
    return buf;
}

struct Draw {
    int label = 0;
    int athlete = 0;
    int duration = 0;
    double tempo = 1.0;
    double rec_phase = 0.0;
    double margin_head = 0.0;
    double margin_tail = 0.0;
    std::uint64_t noise_seed = 0;
};

}  // namespace

data::Corpus generate(const SynthConfig& config) {
    config.validate();
    const auto templates = config.templates.empty()
                               ? default_templates(config.confusable_coupling)
                               : config.templates;
    for (const auto& label : config.labels) {
        if (!templates.count(label)) {
            throw ValidationError("synth: no template for label '" + label + "'");
        }
    }
    const int n_labels = static_cast<int>(config.labels.size());

    std::vector<double> weights = config.label_weights;
    if (weights.empty()) {
        // Imbalance in the spirit of a training-hall log: two frequent
        // elements, two moderately common, two rare.
        static const std::map<std::string, double> kDefault = {
            {"BF", 0.10}, {"BHS", 0.24}, {"BL", 0.15},
            {"BT", 0.16}, {"FW", 0.11},  {"RO", 0.24}};
        for (const auto& l : config.labels) {
            const auto it = kDefault.find(l);
            weights.push_back(it != kDefault.end() ? it->second : 1.0);
        }
    }
    double weight_total = 0.0;
    for (double w : weights) weight_total += w;

    // Per-athlete effects and the label/athlete assignment are drawn serially
    // so the stream layout is fixed; waveforms are derived per recording.
    Rng rng(mix_seed(config.seed, 0xA551));
    std::vector<double> gain(config.n_athletes), warp(config.n_athletes);
    std::vector<double> activity(config.n_athletes);
    std::vector<std::array<double, data::kChannelCount>> channel_gain(config.n_athletes);
    double activity_total = 0.0;
    for (int a = 0; a < config.n_athletes; ++a) {
        gain[a] = std::exp(config.athlete.amplitude_sigma * rng.normal());
        warp[a] = std::exp(config.athlete.timewarp_sigma * rng.normal());
        // Training volume differs heavily between athletes.
        activity[a] = std::exp(config.athlete_activity_sigma * rng.normal());
        activity_total += activity[a];
        for (int c = 0; c < data::kChannelCount; ++c) {
            // Sensor seating differs per athlete, scaling channels unevenly.
            channel_gain[a][c] = std::exp(config.athlete.channel_gain_sigma * rng.normal());
        }
    }

    std::vector<Draw> draws(static_cast<std::size_t>(config.n_recordings));
    for (int i = 0; i < config.n_recordings; ++i) {
        Draw& d = draws[static_cast<std::size_t>(i)];
        if (i < 2 * n_labels) {
            // Guarantee every label at least two distinct athletes.
            d.label = i / 2;
            d.athlete = (2 * d.label + i % 2) % config.n_athletes;
        } else {
            const double u = rng.uniform01() * weight_total;
            double acc = 0.0;
            d.label = n_labels - 1;
            for (int l = 0; l < n_labels; ++l) {
                acc += weights[static_cast<std::size_t>(l)];
                if (u < acc) {
                    d.label = l;
                    break;
                }
            }
            const double pick = rng.uniform01() * activity_total;
            double acc_w = 0.0;
            d.athlete = config.n_athletes - 1;
            for (int a = 0; a < config.n_athletes; ++a) {
                acc_w += activity[a];
                if (pick < acc_w) {
                    d.athlete = a;
                    break;
                }
            }
        }
        const auto& tmpl = templates.at(config.labels[static_cast<std::size_t>(d.label)]);
        d.tempo = std::exp(config.athlete.tempo_jitter * rng.normal());
        const double dur = tmpl.duration_mean * warp[d.athlete] * d.tempo *
                           std::exp(tmpl.duration_spread * rng.normal());
        d.duration = std::clamp(static_cast<int>(std::lround(dur)), config.duration_min,
                                config.duration_max);
        d.rec_phase = (2.0 * rng.uniform01() - 1.0) * M_PI * config.athlete.phase_jitter;
        d.margin_head = rng.uniform01() * config.idle_margin_max;
        d.margin_tail = rng.uniform01() * config.idle_margin_max;
        d.noise_seed = mix_seed(config.seed, 0x5161, static_cast<std::uint64_t>(i));
    }

    data::Corpus corpus;
    corpus.recordings.resize(static_cast<std::size_t>(config.n_recordings));
    parallel::parallel_for(static_cast<std::size_t>(config.n_recordings), [&](std::size_t i) {
        const Draw& d = draws[i];
        const auto& tmpl = templates.at(config.labels[static_cast<std::size_t>(d.label)]);
        data::Recording rec;
        rec.id = recording_name(static_cast<int>(i));
        rec.athlete_id = athlete_name(d.athlete);
        rec.label = config.labels[static_cast<std::size_t>(d.label)];
        rec.sample_rate_hz = config.sample_rate_hz;

        const int t_len = d.duration;
        const double head = d.margin_head * t_len;
        const double tail = (1.0 - d.margin_tail) * (t_len - 1);
        const double span = std::max(1.0, tail - head);

        Rng noise(d.noise_seed);
        for (int c = 0; c < data::kChannelCount; ++c) {
            const auto& channel = tmpl.channels[static_cast<std::size_t>(c)];
            double amp_ref = 0.0;
            for (const auto& h : channel.harmonics) amp_ref += std::abs(h.amplitude);
            const double sigma = config.noise_std * amp_ref;

            auto& samples = rec.channels[static_cast<std::size_t>(c)];
            samples.resize(static_cast<std::size_t>(t_len));
            for (int t = 0; t < t_len; ++t) {
                double window = 0.0;
                if (t >= head && t <= tail) {
                    const double u = (t - head) / span;
                    const double s = std::sin(M_PI * u);
                    window = s * s;
                }
                double v = channel.offset;
                if (window > 0.0) {
                    double burst = 0.0;
                    for (const auto& h : channel.harmonics) {
                        // Execution speed slows both the duration and the
                        // movement frequencies.
                        const double f = h.freq_hz / (warp[d.athlete] * d.tempo);
                        burst += h.amplitude *
                                 std::sin(2.0 * M_PI * f * t / config.sample_rate_hz +
                                          h.phase + d.rec_phase);
                    }
                    v += gain[d.athlete] * channel_gain[d.athlete][c] * window * burst;
                }
                if (sigma > 0.0) v += sigma * noise.normal();
                samples[static_cast<std::size_t>(t)] = v;
            }
        }
        corpus.recordings[i] = std::move(rec);
    });

    corpus.rebuild_index();
    // Invariant check: two athletes per label.
    std::map<std::string, std::set<std::string>> per_label;
    for (const auto& r : corpus.recordings) per_label[r.label].insert(r.athlete_id);
    for (const auto& [label, athletes] : per_label) {
        if (athletes.size() < 2) {
            throw ValidationError("synth: label '" + label +
                                  "' ended up with fewer than 2 athletes");
        }
    }
    return corpus;
}

SynthConfig planted_channel_config(int channel, int n_athletes, int n_recordings,
                                   std::uint64_t seed) {
    if (channel < 0 || channel >= data::kChannelCount) {
        throw ValidationError("planted_channel_config: channel out of range");
    }
    SynthConfig cfg;
    cfg.n_athletes = n_athletes;
    cfg.n_recordings = n_recordings;
    cfg.duration_min = 150;
    cfg.duration_max = 450;
    cfg.seed = seed;
    cfg.noise_std = 0.2;
    cfg.confusable_coupling = 0.0;
    cfg.athlete.amplitude_sigma = 0.10;
    cfg.athlete.timewarp_sigma = 0.05;
    cfg.label_weights.assign(cfg.labels.size(), 1.0);

    const int constant_channel = channel == kMagZ ? kMagY : kMagZ;
    for (std::size_t l = 0; l < cfg.labels.size(); ++l) {
        LabelTemplate t;
        t.duration_mean = 300.0;
        t.duration_spread = 0.10;
        for (int c = 0; c < data::kChannelCount; ++c) {
            if (c == channel) {
                // Only this channel distinguishes the labels.
                t.channels[c] = ch({{1.5 + 0.9 * static_cast<double>(l), 12.0, 0.0}});
            } else if (c == constant_channel) {
                t.channels[c] = ch({}, 40.0);  // exactly constant
            } else {
                t.channels[c] = ch({{2.5, 10.0, 0.4}}, c == kAccZ ? 9.81 : 0.0);
            }
        }
        cfg.templates[cfg.labels[l]] = t;
    }
    return cfg;
}

SynthConfig small_config(int n_recordings, std::uint64_t seed) {
    SynthConfig cfg;
    cfg.n_athletes = 6;
    cfg.n_recordings = n_recordings;
    cfg.seed = seed;
    cfg.label_weights.assign(cfg.labels.size(), 1.0);
    return cfg;
}

// ---------------------------------------------------------------------------
// Config JSON

namespace {

nlohmann::ordered_json template_to_json(const LabelTemplate& t) {
    nlohmann::ordered_json j;
    j["duration_mean"] = t.duration_mean;
    j["duration_spread"] = t.duration_spread;
    nlohmann::ordered_json channels;
    for (int c = 0; c < data::kChannelCount; ++c) {
        nlohmann::ordered_json cj;
        cj["offset"] = t.channels[c].offset;
        cj["harmonics"] = nlohmann::ordered_json::array();
        for (const auto& h : t.channels[c].harmonics) {
            cj["harmonics"].push_back(
                {{"freq_hz", h.freq_hz}, {"amplitude", h.amplitude}, {"phase", h.phase}});
        }
        channels[data::kChannelNames[c]] = cj;
    }
    j["channels"] = channels;
    return j;
}

LabelTemplate template_from_json(const nlohmann::json& j) {
    LabelTemplate t;
    t.duration_mean = j.at("duration_mean").get<double>();
    t.duration_spread = j.at("duration_spread").get<double>();
    const auto& channels = j.at("channels");
    for (int c = 0; c < data::kChannelCount; ++c) {
        const auto& cj = channels.at(data::kChannelNames[c]);
        t.channels[c].offset = cj.at("offset").get<double>();
        for (const auto& h : cj.at("harmonics")) {
            t.channels[c].harmonics.push_back({h.at("freq_hz").get<double>(),
                                               h.at("amplitude").get<double>(),
                                               h.at("phase").get<double>()});
        }
    }
    return t;
}

}  // namespace

std::string config_to_json(const SynthConfig& config) {
    nlohmann::ordered_json j;
    j["n_athletes"] = config.n_athletes;
    j["athlete_activity_sigma"] = config.athlete_activity_sigma;
    j["labels"] = config.labels;
    j["n_recordings"] = config.n_recordings;
    j["duration_min"] = config.duration_min;
    j["duration_max"] = config.duration_max;
    j["sample_rate_hz"] = config.sample_rate_hz;
    j["label_weights"] = config.label_weights;
    j["athlete"] = {{"amplitude_sigma", config.athlete.amplitude_sigma},
                    {"channel_gain_sigma", config.athlete.channel_gain_sigma},
                    {"timewarp_sigma", config.athlete.timewarp_sigma},
                    {"tempo_jitter", config.athlete.tempo_jitter},
                    {"phase_jitter", config.athlete.phase_jitter}};
    j["noise_std"] = config.noise_std;
    j["confusable_coupling"] = config.confusable_coupling;
    j["idle_margin_max"] = config.idle_margin_max;
    j["seed"] = config.seed;
    if (!config.templates.empty()) {
        nlohmann::ordered_json tj;
        for (const auto& [label, t] : config.templates) tj[label] = template_to_json(t);
        j["templates"] = tj;
    }
    return j.dump(2);
}

SynthConfig config_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("synth config unparsable: ") + e.what());
    }
    SynthConfig cfg;
    if (j.contains("n_athletes")) cfg.n_athletes = j["n_athletes"].get<int>();
    if (j.contains("athlete_activity_sigma")) {
        cfg.athlete_activity_sigma = j["athlete_activity_sigma"].get<double>();
    }
    if (j.contains("labels")) cfg.labels = j["labels"].get<std::vector<std::string>>();
    if (j.contains("n_recordings")) cfg.n_recordings = j["n_recordings"].get<int>();
    if (j.contains("duration_min")) cfg.duration_min = j["duration_min"].get<int>();
    if (j.contains("duration_max")) cfg.duration_max = j["duration_max"].get<int>();
    if (j.contains("sample_rate_hz")) cfg.sample_rate_hz = j["sample_rate_hz"].get<double>();
    if (j.contains("label_weights")) {
        cfg.label_weights = j["label_weights"].get<std::vector<double>>();
    }
    if (j.contains("athlete")) {
        const auto& a = j["athlete"];
        if (a.contains("amplitude_sigma")) {
            cfg.athlete.amplitude_sigma = a["amplitude_sigma"].get<double>();
        }
        if (a.contains("channel_gain_sigma")) {
            cfg.athlete.channel_gain_sigma = a["channel_gain_sigma"].get<double>();
        }
        if (a.contains("timewarp_sigma")) {
            cfg.athlete.timewarp_sigma = a["timewarp_sigma"].get<double>();
        }
        if (a.contains("tempo_jitter")) {
            cfg.athlete.tempo_jitter = a["tempo_jitter"].get<double>();
        }
        if (a.contains("phase_jitter")) {
            cfg.athlete.phase_jitter = a["phase_jitter"].get<double>();
        }
    }
    if (j.contains("noise_std")) cfg.noise_std = j["noise_std"].get<double>();
    if (j.contains("confusable_coupling")) {
        cfg.confusable_coupling = j["confusable_coupling"].get<double>();
    }
    if (j.contains("idle_margin_max")) {
        cfg.idle_margin_max = j["idle_margin_max"].get<double>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("templates")) {
        for (const auto& [label, tj] : j["templates"].items()) {
            cfg.templates[label] = template_from_json(tj);
        }
    }
    return cfg;
}

}  // namespace acrosense::synth
