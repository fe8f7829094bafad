#include "acrosense/feature_matrix.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

namespace acrosense::prep {

std::pair<int, int> FeatureMatrix::block_range(int block_index) const {
    const int b = feature_layout.block_size;
    if (block_index < 0 ||
        block_index >= static_cast<int>(feature_layout.channels.size())) {
        throw ValidationError("block_range: channel block index out of range");
    }
    return {block_index * b, (block_index + 1) * b};
}

std::vector<std::string> FeatureMatrix::label_set() const {
    std::set<std::string> s;
    for (const auto& m : row_meta) s.insert(m.label);
    return {s.begin(), s.end()};
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& idx) const {
    FeatureMatrix out;
    out.feature_layout = feature_layout;
    out.norm_stats = norm_stats;
    out.values.resize(static_cast<Eigen::Index>(idx.size()), values.cols());
    out.row_meta.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= rows()) throw ValidationError("select_rows: index out of range");
        out.values.row(static_cast<Eigen::Index>(k)) =
            values.row(static_cast<Eigen::Index>(idx[k]));
        out.row_meta.push_back(row_meta[idx[k]]);
    }
    return out;
}

std::vector<std::size_t> FeatureMatrix::rows_for_ids(
    const std::vector<std::string>& ids) const {
    std::set<std::string> want(ids.begin(), ids.end());
    std::vector<std::size_t> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < row_meta.size(); ++i) {
        if (want.count(row_meta[i].id)) {
            out.push_back(i);
            seen.insert(row_meta[i].id);
        }
    }
    if (seen.size() != want.size()) {
        for (const auto& id : want) {
            if (!seen.count(id)) {
                throw ValidationError("rows_for_ids: id '" + id + "' not present");
            }
        }
    }
    return out;
}

std::uint64_t norm_stats_hash(const std::vector<ChannelStats>& stats) {
    std::string bytes;
    bytes.reserve(stats.size() * 17);
    for (const auto& s : stats) {
        bytes.append(reinterpret_cast<const char*>(&s.mean), sizeof(double));
        bytes.append(reinterpret_cast<const char*>(&s.stddev), sizeof(double));
        bytes.push_back(s.zero_variance ? 1 : 0);
    }
    return fnv1a(bytes);
}

namespace {

nlohmann::ordered_json layout_to_json(const FeatureLayout& fl) {
    nlohmann::ordered_json j;
    j["kind"] = fl.kind;
    j["block_size"] = fl.block_size;
    j["channels"] = fl.channels;
    j["detrend"] = fl.detrend;
    j["normalization"] = fl.normalization;
    return j;
}

FeatureLayout layout_from_json(const nlohmann::json& j) {
    FeatureLayout fl;
    fl.kind = j.at("kind").get<std::string>();
    fl.block_size = j.at("block_size").get<int>();
    fl.channels = j.at("channels").get<std::vector<int>>();
    fl.detrend = j.at("detrend").get<std::string>();
    fl.normalization = j.at("normalization").get<std::string>();
    return fl;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    T v;
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ValidationError("feature container truncated");
    return v;
}

}  // namespace

void save_features(const FeatureMatrix& fm, const std::filesystem::path& path,
                   const std::string& extra_json) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out.write("ACF1", 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(fm.rows()));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(fm.cols()));
    for (Eigen::Index r = 0; r < fm.values.rows(); ++r) {
        for (Eigen::Index c = 0; c < fm.values.cols(); ++c) {
            write_le<double>(out, fm.values(r, c));
        }
    }
    nlohmann::ordered_json trailer;
    trailer["row_meta"] = nlohmann::ordered_json::array();
    for (const auto& m : fm.row_meta) {
        trailer["row_meta"].push_back(
            {{"id", m.id}, {"athlete_id", m.athlete_id}, {"label", m.label}});
    }
    trailer["feature_layout"] = layout_to_json(fm.feature_layout);
    trailer["norm_stats"] = nlohmann::ordered_json::array();
    for (const auto& s : fm.norm_stats) {
        trailer["norm_stats"].push_back({{"mean", s.mean},
                                         {"stddev", s.stddev},
                                         {"zero_variance", s.zero_variance}});
    }
    if (!extra_json.empty()) {
        trailer["extra"] = nlohmann::ordered_json::parse(extra_json);
    }
    out << trailer.dump();
}

FeatureMatrix load_features(const std::filesystem::path& path, std::string* extra_json) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "ACF1", 4) != 0) {
        throw ValidationError("not a feature container (bad magic): " + path.string());
    }
    const auto rows = read_le<std::uint32_t>(in);
    const auto cols = read_le<std::uint32_t>(in);
    FeatureMatrix fm;
    fm.values.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (std::uint32_t c = 0; c < cols; ++c) {
            fm.values(r, c) = read_le<double>(in);
        }
    }
    std::string rest((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    nlohmann::json trailer;
    try {
        trailer = nlohmann::json::parse(rest);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("feature container trailer unparsable: " +
                              std::string(e.what()));
    }
    for (const auto& m : trailer.at("row_meta")) {
        fm.row_meta.push_back({m.at("id").get<std::string>(),
                               m.at("athlete_id").get<std::string>(),
                               m.at("label").get<std::string>()});
    }
    if (fm.row_meta.size() != rows) {
        throw ValidationError("feature container: row_meta length != rows");
    }
    fm.feature_layout = layout_from_json(trailer.at("feature_layout"));
    for (const auto& s : trailer.at("norm_stats")) {
        fm.norm_stats.push_back({s.at("mean").get<double>(),
                                 s.at("stddev").get<double>(),
                                 s.at("zero_variance").get<bool>()});
    }
    if (extra_json) {
        *extra_json = trailer.contains("extra") ? trailer["extra"].dump() : "";
    }
    return fm;
}

void export_features_csv(const FeatureMatrix& fm, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << "id,athlete_id,label";
    for (std::size_t c = 0; c < fm.cols(); ++c) out << ",f" << c;
    out << '\n';
    char buf[40];
    for (std::size_t r = 0; r < fm.rows(); ++r) {
        out << fm.row_meta[r].id << ',' << fm.row_meta[r].athlete_id << ','
            << fm.row_meta[r].label;
        for (std::size_t c = 0; c < fm.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g",
                          fm.values(static_cast<Eigen::Index>(r),
                                    static_cast<Eigen::Index>(c)));
            out << ',' << buf;
        }
        out << '\n';
    }
}

}  // namespace acrosense::prep
