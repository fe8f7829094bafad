#include "acrosense/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace acrosense::data {

const std::array<std::string, kChannelCount> kChannelNames = {
    "acc_x", "acc_y", "acc_z", "gyr_x", "gyr_y", "gyr_z", "mag_x", "mag_y", "mag_z"};

void Recording::validate() const {
    if (id.empty()) throw ValidationError("recording with empty id");
    if (!(sample_rate_hz > 0.0)) {
        throw ValidationError("recording '" + id + "': sample_rate_hz must be > 0");
    }
    const std::size_t n = channels[0].size();
    if (n < 2) {
        throw ValidationError("recording '" + id + "': channels must have length >= 2");
    }
    for (int c = 0; c < kChannelCount; ++c) {
        if (channels[c].size() != n) {
            throw ValidationError("recording '" + id + "': channel length mismatch (" +
                                  kChannelNames[c] + ")");
        }
        for (double v : channels[c]) {
            if (!std::isfinite(v)) {
                throw ValidationError("recording '" + id + "': non-finite sample in " +
                                      kChannelNames[c]);
            }
        }
    }
}

void Corpus::rebuild_index() {
    std::set<std::string> labels, athletes, ids;
    for (const auto& r : recordings) {
        if (!ids.insert(r.id).second) {
            throw ValidationError("duplicate recording id '" + r.id + "'");
        }
        labels.insert(r.label);
        athletes.insert(r.athlete_id);
    }
    label_set.assign(labels.begin(), labels.end());
    athlete_set.assign(athletes.begin(), athletes.end());
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

Recording load_recording_csv(const std::filesystem::path& path, std::string id,
                             std::string athlete_id, std::string label,
                             double sample_rate_hz) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("recording '" + id + "': cannot open " + path.string());
    }
    Recording rec;
    rec.id = std::move(id);
    rec.athlete_id = std::move(athlete_id);
    rec.label = std::move(label);
    rec.sample_rate_hz = sample_rate_hz;

    std::string line;
    if (!std::getline(in, line)) {
        throw ValidationError("recording '" + rec.id + "': empty file " + path.string());
    }
    const std::string expected = "t,acc_x,acc_y,acc_z,gyr_x,gyr_y,gyr_z,mag_x,mag_y,mag_z";
    {
        std::string hdr = line;
        if (!hdr.empty() && hdr.back() == '\r') hdr.pop_back();
        if (hdr != expected) {
            throw ValidationError("recording '" + rec.id + "': bad CSV header in " +
                                  path.string());
        }
    }

    double prev_t = -std::numeric_limits<double>::infinity();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_line(line);
        if (fields.size() != 10) {
            throw ValidationError("recording '" + rec.id + "': malformed row at " +
                                  path.filename().string() + ":" + std::to_string(line_no));
        }
        double values[10];
        for (int i = 0; i < 10; ++i) {
            try {
                std::size_t pos = 0;
                values[i] = std::stod(fields[i], &pos);
                if (pos != fields[i].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ValidationError("recording '" + rec.id + "': unparsable value '" +
                                      fields[i] + "' at " + path.filename().string() + ":" +
                                      std::to_string(line_no));
            }
            if (!std::isfinite(values[i])) {
                throw ValidationError("recording '" + rec.id + "': non-finite sample at " +
                                      path.filename().string() + ":" +
                                      std::to_string(line_no));
            }
        }
        if (!(values[0] > prev_t)) {
            throw ValidationError("recording '" + rec.id +
                                  "': timestamps not strictly increasing at " +
                                  path.filename().string() + ":" + std::to_string(line_no));
        }
        prev_t = values[0];
        for (int c = 0; c < kChannelCount; ++c) rec.channels[c].push_back(values[c + 1]);
    }
    rec.validate();
    return rec;
}

}  // namespace

Corpus load_corpus(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        throw ValidationError("cannot open manifest " + manifest_path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("malformed manifest " + manifest_path.string() + ": " +
                              e.what());
    }
    if (!doc.is_array()) {
        throw ValidationError("manifest must be a JSON array: " + manifest_path.string());
    }

    struct Entry {
        std::string id, athlete_id, label, path;
        double sample_rate_hz;
    };
    std::vector<Entry> entries;
    for (const auto& item : doc) {
        Entry e;
        try {
            e.id = item.at("id").get<std::string>();
            e.athlete_id = item.at("athlete_id").get<std::string>();
            e.label = item.at("label").get<std::string>();
            e.sample_rate_hz = item.at("sample_rate_hz").get<double>();
            e.path = item.at("path").get<std::string>();
        } catch (const nlohmann::json::exception& e2) {
            throw ValidationError("manifest entry missing field: " + std::string(e2.what()));
        }
        entries.push_back(std::move(e));
    }

    const auto base = manifest_path.parent_path();
    Corpus corpus;
    corpus.recordings.resize(entries.size());
    // Files parse independently; merge order is manifest order.
    std::vector<std::string> errors(entries.size());
    parallel::parallel_for(entries.size(), [&](std::size_t i) {
        const auto& e = entries[i];
        std::filesystem::path p(e.path);
        if (p.is_relative()) p = base / p;
        try {
            corpus.recordings[i] =
                load_recording_csv(p, e.id, e.athlete_id, e.label, e.sample_rate_hz);
        } catch (const std::exception& ex) {
            errors[i] = ex.what();
        }
    });
    for (const auto& err : errors) {
        if (!err.empty()) throw ValidationError(err);
    }
    corpus.rebuild_index();
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
    for (const auto& r : corpus.recordings) {
        const std::string fname = r.id + ".csv";
        nlohmann::ordered_json entry;
        entry["id"] = r.id;
        entry["athlete_id"] = r.athlete_id;
        entry["label"] = r.label;
        entry["sample_rate_hz"] = r.sample_rate_hz;
        entry["path"] = fname;
        manifest.push_back(entry);

        std::ofstream csv(dir / fname, std::ios::binary);
        if (!csv) throw ValidationError("cannot write " + (dir / fname).string());
        csv << "t,acc_x,acc_y,acc_z,gyr_x,gyr_y,gyr_z,mag_x,mag_y,mag_z\n";
        char buf[32];
        for (std::size_t t = 0; t < r.length(); ++t) {
            std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(t) / r.sample_rate_hz);
            csv << buf;
            for (int c = 0; c < kChannelCount; ++c) {
                std::snprintf(buf, sizeof(buf), "%.9g", r.channels[c][t]);
                csv << ',' << buf;
            }
            csv << '\n';
        }
    }
    std::ofstream mf(dir / "manifest.json", std::ios::binary);
    if (!mf) throw ValidationError("cannot write manifest in " + dir.string());
    mf << manifest.dump(2) << '\n';
}

Corpus filter_rare_labels(const Corpus& corpus, int min_count) {
    if (min_count < 1) throw ValidationError("filter_rare_labels: min_count must be >= 1");
    std::map<std::string, int> counts;
    for (const auto& r : corpus.recordings) ++counts[r.label];
    Corpus out;
    for (const auto& r : corpus.recordings) {
        if (counts[r.label] >= min_count) out.recordings.push_back(r);
    }
    if (out.recordings.empty()) {
        throw ValidationError("filter_rare_labels: all labels occur fewer than " +
                              std::to_string(min_count) + " times");
    }
    out.rebuild_index();
    return out;
}

SplitPlan make_split(const Corpus& corpus, int holdout_athlete_count,
                     int target_holdout_size, std::uint64_t seed) {
    const int n_athletes = static_cast<int>(corpus.athlete_set.size());
    if (holdout_athlete_count < 0 || holdout_athlete_count >= n_athletes) {
        throw ValidationError("make_split: holdout_athlete_count must be in [0, athletes)");
    }

    // Each label must be performed by at least two athletes, otherwise no
    // athlete-disjoint holdout containing that athlete can exist.
    std::map<std::string, std::set<std::string>> label_athletes;
    std::map<std::string, int> athlete_counts;
    for (const auto& r : corpus.recordings) {
        label_athletes[r.label].insert(r.athlete_id);
        ++athlete_counts[r.athlete_id];
    }
    for (const auto& [label, athletes] : label_athletes) {
        if (athletes.size() < 2 && holdout_athlete_count > 0) {
            throw ValidationError("make_split: label '" + label +
                                  "' is performed by fewer than two athletes");
        }
    }

    SplitPlan plan;
    if (holdout_athlete_count == 0) {
        for (const auto& r : corpus.recordings) plan.train_ids.push_back(r.id);
        return plan;
    }

    Rng rng(seed);
    std::vector<std::string> athletes = corpus.athlete_set;
    const int kCandidates = 10000;
    std::vector<std::string> best;
    long best_score = -1;
    std::set<std::string> blocking_labels;

    for (int trial = 0; trial < kCandidates; ++trial) {
        rng.shuffle(athletes);
        std::set<std::string> chosen(athletes.begin(),
                                     athletes.begin() + holdout_athlete_count);
        bool feasible = true;
        for (const auto& [label, performers] : label_athletes) {
            bool retained = false;
            for (const auto& a : performers) {
                if (!chosen.count(a)) {
                    retained = true;
                    break;
                }
            }
            if (!retained) {
                feasible = false;
                blocking_labels.insert(label);
            }
        }
        if (!feasible) continue;
        long size = 0;
        for (const auto& a : chosen) size += athlete_counts[a];
        const long score = std::labs(size - target_holdout_size);
        if (best_score < 0 || score < best_score) {
            best_score = score;
            best.assign(chosen.begin(), chosen.end());
        }
    }

    if (best_score < 0) {
        std::string msg = "make_split: no feasible holdout; blocking labels:";
        for (const auto& l : blocking_labels) msg += " " + l;
        throw ValidationError(msg);
    }

    const std::set<std::string> holdout_set(best.begin(), best.end());
    plan.holdout_athletes = best;
    for (const auto& r : corpus.recordings) {
        if (holdout_set.count(r.athlete_id)) {
            plan.holdout_ids.push_back(r.id);
        } else {
            plan.train_ids.push_back(r.id);
        }
    }
    return plan;
}

}  // namespace acrosense::data
