#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "acrosense/common.hpp"
#include "acrosense/core_data.hpp"
#include "acrosense/evaluation.hpp"
#include "acrosense/gp.hpp"
#include "acrosense/pipeline.hpp"
#include "acrosense/preprocess.hpp"
#include "acrosense/spectral.hpp"
#include "acrosense/svg.hpp"
#include "acrosense/synthgen.hpp"
#include "acrosense/unsupervised.hpp"

namespace {

using namespace acrosense;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stoi(item));
    }
    if (out.empty()) throw ValidationError("empty integer list: '" + text + "'");
    return out;
}

std::vector<int> parse_channels(const std::string& text) {
    if (text == "all") return {0, 1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        bool named = false;
        for (int c = 0; c < data::kChannelCount; ++c) {
            if (item == data::kChannelNames[c]) {
                out.push_back(c);
                named = true;
                break;
            }
        }
        if (!named) out.push_back(std::stoi(item));
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw ValidationError("empty channel list");
    return out;
}

std::string quoted_json(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

struct SplitRecord {
    std::vector<std::string> train_ids, holdout_ids, holdout_athletes;
    bool present = false;
};

std::string split_to_json(const data::SplitPlan& split,
                          const std::vector<std::pair<std::string, std::string>>& config) {
    std::ostringstream out;
    out << "{\"config\":{";
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i) out << ',';
        out << quoted_json(config[i].first) << ':' << quoted_json(config[i].second);
    }
    out << "},\"split\":{\"train_ids\":[";
    for (std::size_t i = 0; i < split.train_ids.size(); ++i) {
        if (i) out << ',';
        out << quoted_json(split.train_ids[i]);
    }
    out << "],\"holdout_ids\":[";
    for (std::size_t i = 0; i < split.holdout_ids.size(); ++i) {
        if (i) out << ',';
        out << quoted_json(split.holdout_ids[i]);
    }
    out << "],\"holdout_athletes\":[";
    for (std::size_t i = 0; i < split.holdout_athletes.size(); ++i) {
        if (i) out << ',';
        out << quoted_json(split.holdout_athletes[i]);
    }
    out << "]}}";
    return out.str();
}

SplitRecord split_from_extra(const std::string& extra) {
    SplitRecord rec;
    if (extra.empty()) return rec;
    const auto j = nlohmann::json::parse(extra);
    if (!j.contains("split")) return rec;
    rec.present = true;
    rec.train_ids = j["split"]["train_ids"].get<std::vector<std::string>>();
    rec.holdout_ids = j["split"]["holdout_ids"].get<std::vector<std::string>>();
    rec.holdout_athletes = j["split"]["holdout_athletes"].get<std::vector<std::string>>();
    return rec;
}

/// Train rows = split train rows when a split is recorded, else all rows.
prep::FeatureMatrix training_view(const prep::FeatureMatrix& fm, const SplitRecord& rec) {
    if (!rec.present || rec.train_ids.empty()) return fm;
    return fm.select_rows(fm.rows_for_ids(rec.train_ids));
}

void stamp_config(std::ostream& out,
                  const std::vector<std::pair<std::string, std::string>>& config,
                  std::uint64_t seed) {
    out << "  \"seed\": " << seed << ",\n  \"config\": {";
    std::string blob;
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (i) out << ", ";
        out << quoted_json(config[i].first) << ": " << quoted_json(config[i].second);
        blob += config[i].first + "=" + config[i].second + ";";
    }
    out << "},\n  \"config_hash\": " << quoted_json(hash_hex(fnv1a(blob))) << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand configuration

struct SynthArgs {
    std::string out_dir;
    std::string config_path;
    int n_recordings = -1;
    int n_athletes = -1;
    std::uint64_t seed = 1;
    bool seed_set = false;
};

struct FeatureArgs {
    std::string manifest;
    std::string out_path;
    std::string csv_path;
    std::string channels = "all";
    std::string mode = "interpolate";
    int target_length = 898;
    int bins = 1000;
    int min_count = 10;
    int holdout_athletes = 0;
    int target_holdout = 0;
    std::uint64_t seed = 0;
};

struct ExploreArgs {
    std::string features;
    std::string out_path;
    std::string svg_path;
    int q = 4;
    int k = 0;
    std::uint64_t seed = 0;
};

struct TrainArgs {
    std::string features;
    std::string kernel = "C(1.0)*RQ(l=1.0,a=1.0)";
    std::string out_model;
    std::string report_path;
    bool optimize_lml = false;
    std::uint64_t seed = 0;
};

struct EvaluateArgs {
    std::string features;
    std::string model;
    std::string out_dir = ".";
    std::string cv;
    int folds = 5;
    std::uint64_t seed = 0;
};

struct CurveArgs {
    std::string features;
    std::string kernel = "C(1.0)*RQ(l=1.0,a=1.0)";
    std::string cv = "kf";
    std::string sizes = "100,200,400,600";
    std::string out_path;
    std::string svg_path;
    int folds = 5;
    std::uint64_t seed = 0;
};

struct ImportanceArgs {
    std::string features;
    std::string model;
    std::string out_path;
    std::string svg_path;
    int repeats = 10;
    std::uint64_t seed = 0;
};

struct PipelineArgs {
    std::string manifest;
    std::string out_dir = ".";
    std::string features = "spectra";
    std::string cv = "sgkf";
    std::string channels = "all";
    std::string sizes = "100,200,400,600";
    std::string kernel = "C(1.0)*RQ(l=1.0,a=1.0)";
    std::string mode = "interpolate";
    int bins = 1000;
    int target_length = 898;
    int folds = 5;
    int search_iters = 10;
    int repeats = 10;
    int holdout_athletes = 4;
    int target_holdout = 254;
    int min_count = 10;
    std::uint64_t seed = 0;
    bool no_curve = false;
    bool no_importance = false;
};

int run_synth(const SynthArgs& args) {
    synth::SynthConfig cfg;
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw ValidationError("cannot open " + args.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = synth::config_from_json(buf.str());
    }
    if (args.n_recordings > 0) cfg.n_recordings = args.n_recordings;
    if (args.n_athletes > 0) cfg.n_athletes = args.n_athletes;
    if (args.seed_set) cfg.seed = args.seed;

    const auto corpus = synth::generate(cfg);
    data::save_corpus(corpus, args.out_dir);
    std::ofstream cj(std::filesystem::path(args.out_dir) / "synth_config.json",
                     std::ios::binary);
    cj << synth::config_to_json(cfg) << '\n';
    std::cout << "wrote " << corpus.size() << " recordings ("
              << corpus.athlete_set.size() << " athletes, " << corpus.label_set.size()
              << " labels) to " << args.out_dir << "\n";
    return 0;
}

int run_featurize(const FeatureArgs& args, bool spectra) {
    if (args.out_path.empty()) throw ValidationError("--out is required");
    auto corpus = data::load_corpus(args.manifest);
    corpus = data::filter_rare_labels(corpus, args.min_count);
    data::SplitPlan split;
    if (args.holdout_athletes > 0) {
        split = data::make_split(corpus, args.holdout_athletes, args.target_holdout,
                                 args.seed);
    } else {
        for (const auto& r : corpus.recordings) split.train_ids.push_back(r.id);
    }

    prep::FeatureMatrix fm;
    std::vector<std::pair<std::string, std::string>> config;
    if (spectra) {
        spectral::SpectrumConfig cfg;
        cfg.bins = args.bins;
        cfg.channel_mask = parse_channels(args.channels);
        fm = spectral::build_spectra_features(corpus, cfg, split.train_ids);
        config.emplace_back("stage", "spectra");
        config.emplace_back("bins", std::to_string(args.bins));
    } else {
        prep::PipelineConfig cfg;
        cfg.mode = args.mode == "pad" ? prep::ResampleMode::kPad
                                      : prep::ResampleMode::kInterpolate;
        cfg.target_length = args.target_length;
        cfg.channel_mask = parse_channels(args.channels);
        if (cfg.mode == prep::ResampleMode::kPad) {
            std::size_t longest = 0;
            for (const auto& r : corpus.recordings) {
                longest = std::max(longest, r.length());
            }
            cfg.target_length = std::max(cfg.target_length, static_cast<int>(longest));
        }
        fm = prep::build_features(corpus, cfg, split.train_ids);
        config.emplace_back("stage", "preprocess");
        config.emplace_back("mode", args.mode);
        config.emplace_back("len", std::to_string(cfg.target_length));
    }
    config.emplace_back("channels", args.channels);
    config.emplace_back("min_count", std::to_string(args.min_count));
    config.emplace_back("holdout_athletes", std::to_string(args.holdout_athletes));
    config.emplace_back("target_holdout", std::to_string(args.target_holdout));
    config.emplace_back("seed", std::to_string(args.seed));

    prep::save_features(fm, args.out_path, split_to_json(split, config));
    if (!args.csv_path.empty()) prep::export_features_csv(fm, args.csv_path);
    std::cout << "wrote " << fm.rows() << "x" << fm.cols() << " features to "
              << args.out_path << " (" << split.train_ids.size() << " train, "
              << split.holdout_ids.size() << " holdout rows)\n";
    return 0;
}

int run_explore(const ExploreArgs& args) {
    if (args.out_path.empty()) throw ValidationError("--out is required");
    std::string extra;
    const auto fm = prep::load_features(args.features, &extra);

    const int q = args.q;
    const auto pca = unsupervised::fit_pca(fm, q);
    const Eigen::MatrixXd projected = pca.transform(fm.values);

    std::vector<std::string> labels;
    for (const auto& m : fm.row_meta) labels.push_back(m.label);
    const auto truth = unsupervised::encode_labels(labels);
    const int k = args.k > 0 ? args.k : static_cast<int>(fm.label_set().size());

    auto clustering = unsupervised::kmeans(projected, k, args.seed);
    clustering.ari = unsupervised::adjusted_rand_index(clustering.assignments, truth);

    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + args.out_path);
    out << "{\n  \"explained_variance_ratio\": [";
    for (int i = 0; i < pca.explained_variance_ratio.size(); ++i) {
        if (i) out << ", ";
        out << format_double(pca.explained_variance_ratio(i));
    }
    out << "],\n  \"ari\": " << format_double(clustering.ari);
    out << ",\n  \"inertia\": " << format_double(clustering.inertia);
    out << ",\n  \"assignments\": [";
    for (std::size_t i = 0; i < clustering.assignments.size(); ++i) {
        if (i) out << ", ";
        out << clustering.assignments[i];
    }
    out << "],\n";
    stamp_config(out,
                 {{"stage", "explore"},
                  {"q", std::to_string(q)},
                  {"k", std::to_string(k)}},
                 args.seed);
    out << "}\n";

    if (!args.svg_path.empty()) {
        std::vector<double> x, y;
        for (Eigen::Index i = 0; i < projected.rows(); ++i) {
            x.push_back(projected(i, 0));
            y.push_back(projected.cols() > 1 ? projected(i, 1) : 0.0);
        }
        svg::write_scatter(x, y, clustering.assignments,
                           "principal components / k-means clusters", args.svg_path);
    }
    std::cout << "ari " << clustering.ari << ", inertia " << clustering.inertia << "\n";
    return 0;
}

int run_train(const TrainArgs& args) {
    if (args.out_model.empty()) throw ValidationError("--out is required");
    std::string extra;
    const auto fm = prep::load_features(args.features, &extra);
    const auto split = split_from_extra(extra);
    const auto train_fm = training_view(fm, split);

    gp::FitOptions options;
    options.optimize_lml = args.optimize_lml;
    options.seed = args.seed;
    const auto model = gp::fit(train_fm, kernels::parse(args.kernel), options);
    gp::save_model(model, args.out_model);

    const std::string report_path =
        args.report_path.empty() ? args.out_model + ".json" : args.report_path;
    std::ofstream out(report_path, std::ios::binary);
    out << "{\n  \"kernel\": " << quoted_json(kernels::print(model.kernel));
    out << ",\n  \"label_order\": [";
    for (std::size_t i = 0; i < model.label_order.size(); ++i) {
        if (i) out << ", ";
        out << quoted_json(model.label_order[i]);
    }
    out << "],\n  \"log_marginal_likelihood\": [";
    for (std::size_t i = 0; i < model.states.size(); ++i) {
        if (i) out << ", ";
        out << format_double(model.states[i].log_marginal_likelihood);
    }
    out << "],\n  \"train_rows\": " << model.train_features.rows() << ",\n";
    stamp_config(out,
                 {{"stage", "train"},
                  {"kernel", args.kernel},
                  {"optimize_lml", args.optimize_lml ? "on" : "off"}},
                 args.seed);
    out << "}\n";
    std::cout << "trained on " << model.train_features.rows() << " rows; kernel "
              << kernels::print(model.kernel) << "\n";
    return 0;
}

int run_evaluate(const EvaluateArgs& args) {
    std::string extra;
    const auto fm = prep::load_features(args.features, &extra);
    const auto split = split_from_extra(extra);
    if (!split.present || split.holdout_ids.empty()) {
        throw ValidationError("evaluate: features file has no holdout split");
    }
    const auto model = gp::load_model(args.model);
    const auto train_fm = fm.select_rows(fm.rows_for_ids(split.train_ids));
    const auto holdout_fm = fm.select_rows(fm.rows_for_ids(split.holdout_ids));

    eval::EvalReport report;
    report.scheme = args.cv.empty() ? "none" : eval::scheme_name(
                                                   eval::scheme_from_name(args.cv));
    report.kernel = model.kernel;
    report.kernel_expression = kernels::print(model.kernel);
    report.label_order = model.label_order;

    if (!args.cv.empty()) {
        eval::CvPlan plan;
        if (eval::scheme_from_name(args.cv) == eval::CvScheme::kKFold) {
            plan = eval::make_kfold(train_fm.rows(), args.folds, args.seed);
        } else {
            std::vector<std::string> labels, groups;
            for (const auto& m : train_fm.row_meta) {
                labels.push_back(m.label);
                groups.push_back(m.athlete_id);
            }
            plan = eval::make_sgkf(labels, groups, args.folds, args.seed);
        }
        const auto cv = eval::cross_validate(train_fm, model.kernel, plan);
        report.cv_accuracy_mean = cv.mean_accuracy;
        report.cv_accuracy_std = cv.std_accuracy;
    }

    const auto predicted = gp::predict_labels(model, holdout_fm.values);
    std::vector<std::string> truth;
    for (const auto& m : holdout_fm.row_meta) truth.push_back(m.label);
    report.confusion = eval::confusion_matrix(truth, predicted, model.label_order);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == predicted[i]) ++hits;
    }
    report.holdout_accuracy =
        static_cast<double>(hits) / static_cast<double>(truth.size());
    report.seed = args.seed;
    report.config = {{"stage", "evaluate"},
                     {"cv", args.cv.empty() ? "none" : args.cv},
                     {"folds", std::to_string(args.folds)},
                     {"seed", std::to_string(args.seed)}};
    std::string blob;
    for (const auto& [k, v] : report.config) blob += k + "=" + v + ";";
    report.config_hash = hash_hex(fnv1a(blob));

    std::filesystem::create_directories(args.out_dir);
    eval::write_eval_json(report, std::filesystem::path(args.out_dir) / "eval.json");
    eval::write_confusion_csv(report.confusion, report.label_order,
                              std::filesystem::path(args.out_dir) / "confusion.csv");
    std::cout << "holdout accuracy " << report.holdout_accuracy << "\n";
    return 0;
}

int run_curve(const CurveArgs& args) {
    if (args.out_path.empty()) throw ValidationError("--out is required");
    std::string extra;
    const auto fm = prep::load_features(args.features, &extra);
    const auto split = split_from_extra(extra);
    if (!split.present || split.holdout_ids.empty()) {
        throw ValidationError("learning-curve: features file has no holdout split");
    }
    const auto train_fm = fm.select_rows(fm.rows_for_ids(split.train_ids));
    const auto holdout_fm = fm.select_rows(fm.rows_for_ids(split.holdout_ids));

    const auto scheme = eval::scheme_from_name(args.cv);
    const auto points = eval::learning_curve(train_fm, holdout_fm,
                                             kernels::parse(args.kernel),
                                             parse_int_list(args.sizes), scheme,
                                             args.folds, args.seed);

    std::ofstream out(args.out_path, std::ios::binary);
    out << "{\n  \"scheme\": " << quoted_json(eval::scheme_name(scheme));
    out << ",\n  \"points\": [";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (i) out << ", ";
        out << "{\"train_size\": " << p.train_size << ", \"mean_accuracy\": ";
        if (p.degenerate) {
            out << "null, \"std_accuracy\": null";
        } else {
            out << format_double(p.mean_accuracy)
                << ", \"std_accuracy\": " << format_double(p.std_accuracy);
        }
        out << ", \"degenerate\": " << (p.degenerate ? "true" : "false") << "}";
    }
    out << "],\n";
    stamp_config(out,
                 {{"stage", "learning-curve"},
                  {"cv", args.cv},
                  {"folds", std::to_string(args.folds)},
                  {"sizes", args.sizes},
                  {"kernel", args.kernel}},
                 args.seed);
    out << "}\n";

    if (!args.svg_path.empty()) {
        svg::write_learning_curve({{eval::scheme_name(scheme), points}}, args.svg_path);
    }
    return 0;
}

int run_importance(const ImportanceArgs& args) {
    if (args.out_path.empty()) throw ValidationError("--out is required");
    std::string extra;
    const auto fm = prep::load_features(args.features, &extra);
    const auto split = split_from_extra(extra);
    if (!split.present || split.holdout_ids.empty()) {
        throw ValidationError("importance: features file has no holdout split");
    }
    const auto holdout_fm = fm.select_rows(fm.rows_for_ids(split.holdout_ids));
    const auto model = gp::load_model(args.model);

    const auto importance =
        eval::permutation_importance(model, holdout_fm, args.repeats, args.seed);

    std::ofstream out(args.out_path, std::ios::binary);
    out << "{\n  \"importance\": [";
    for (std::size_t i = 0; i < importance.size(); ++i) {
        const auto& ci = importance[i];
        if (i) out << ", ";
        out << "{\"channel\": " << quoted_json(ci.name)
            << ", \"mean_drop\": " << format_double(ci.mean_drop)
            << ", \"std_drop\": " << format_double(ci.std_drop) << "}";
    }
    out << "],\n";
    stamp_config(out,
                 {{"stage", "importance"}, {"repeats", std::to_string(args.repeats)}},
                 args.seed);
    out << "}\n";

    if (!args.svg_path.empty()) svg::write_importance_bars(importance, args.svg_path);
    return 0;
}

int run_pipeline_cmd(const PipelineArgs& args) {
    pipeline::PipelineOptions options;
    options.min_label_count = args.min_count;
    options.holdout_athletes = args.holdout_athletes;
    options.target_holdout = args.target_holdout;
    options.feature_kind = args.features;
    options.bins = args.bins;
    options.raw_mode = args.mode == "pad" ? prep::ResampleMode::kPad
                                          : prep::ResampleMode::kInterpolate;
    options.raw_target_length = args.target_length;
    options.channel_mask = parse_channels(args.channels);
    options.scheme = eval::scheme_from_name(args.cv);
    options.folds = args.folds;
    options.search_iterations = args.search_iters;
    options.kernel_template = args.kernel;
    options.curve_sizes = parse_int_list(args.sizes);
    options.importance_repeats = args.repeats;
    options.with_learning_curve = !args.no_curve;
    options.with_importance = !args.no_importance;
    options.seed = args.seed;

    const auto corpus = data::load_corpus(args.manifest);
    const auto result = pipeline::run_pipeline(corpus, options);

    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);
    eval::write_eval_json(result.report, dir / "eval.json");
    eval::write_confusion_csv(result.report.confusion, result.report.label_order,
                              dir / "confusion.csv");
    gp::save_model(result.model, dir / "model.bin");
    if (!result.report.curve.empty()) {
        svg::write_learning_curve({{result.report.scheme, result.report.curve}},
                                  dir / "learning_curve.svg");
    }
    if (!result.report.importance.empty()) {
        svg::write_importance_bars(result.report.importance, dir / "importance.svg");
    }
    std::cout << "cv accuracy " << result.report.cv_accuracy_mean << " +- "
              << result.report.cv_accuracy_std << ", holdout accuracy "
              << result.report.holdout_accuracy << "\nreports in " << args.out_dir
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acrosense: tumbling-element classification from single-IMU recordings"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic corpus");
    cmd_synth->add_option("--out", synth_args.out_dir, "output directory")->required();
    cmd_synth->add_option("--config", synth_args.config_path, "generator config JSON");
    cmd_synth->add_option("--n", synth_args.n_recordings, "number of recordings");
    cmd_synth->add_option("--athletes", synth_args.n_athletes, "number of athletes");
    auto* synth_seed = cmd_synth->add_option("--seed", synth_args.seed, "RNG seed");

    FeatureArgs pre_args;
    auto* cmd_pre = app.add_subcommand("preprocess", "raw time-domain features");
    FeatureArgs spec_args;
    auto* cmd_spec = app.add_subcommand("spectra", "autocorrelation power spectra features");
    for (auto [cmd, fa] : {std::pair{cmd_pre, &pre_args}, std::pair{cmd_spec, &spec_args}}) {
        cmd->add_option("--manifest", fa->manifest, "corpus manifest")->required();
        cmd->add_option("--out", fa->out_path, "output feature container")->required();
        cmd->add_option("--csv", fa->csv_path, "optional CSV export");
        cmd->add_option("--channels", fa->channels, "channel mask (names, indices or 'all')");
        cmd->add_option("--min-count", fa->min_count, "rare-label threshold");
        cmd->add_option("--holdout-athletes", fa->holdout_athletes, "athletes held out");
        cmd->add_option("--target-holdout", fa->target_holdout, "target holdout size");
        cmd->add_option("--seed", fa->seed, "RNG seed");
    }
    cmd_pre->add_option("--mode", pre_args.mode, "pad | interpolate");
    cmd_pre->add_option("--len", pre_args.target_length, "target length per channel");
    cmd_spec->add_option("--bins", spec_args.bins, "spectrum bins per channel");

    ExploreArgs explore_args;
    auto* cmd_explore = app.add_subcommand("explore", "PCA + k-means structure report");
    cmd_explore->add_option("--features", explore_args.features)->required();
    cmd_explore->add_option("--out", explore_args.out_path, "report JSON")->required();
    cmd_explore->add_option("--svg", explore_args.svg_path, "scatter SVG");
    cmd_explore->add_option("--q", explore_args.q, "retained components");
    cmd_explore->add_option("--k", explore_args.k, "clusters (default: #labels)");
    cmd_explore->add_option("--seed", explore_args.seed, "RNG seed");

    TrainArgs train_args;
    auto* cmd_train = app.add_subcommand("train", "fit a GP classifier");
    cmd_train->add_option("--features", train_args.features)->required();
    cmd_train->add_option("--kernel", train_args.kernel, "kernel expression");
    cmd_train->add_option("--out", train_args.out_model, "model file")->required();
    cmd_train->add_option("--report", train_args.report_path, "train report JSON");
    cmd_train->add_flag("--optimize-lml", train_args.optimize_lml,
                        "hill-climb the log marginal likelihood");
    cmd_train->add_option("--seed", train_args.seed, "RNG seed");

    EvaluateArgs eval_args;
    auto* cmd_eval = app.add_subcommand("evaluate", "holdout evaluation of a model");
    cmd_eval->add_option("--features", eval_args.features)->required();
    cmd_eval->add_option("--model", eval_args.model)->required();
    cmd_eval->add_option("--out", eval_args.out_dir, "output directory");
    cmd_eval->add_option("--cv", eval_args.cv, "also cross-validate: kf | sgkf");
    cmd_eval->add_option("--folds", eval_args.folds, "CV folds");
    cmd_eval->add_option("--seed", eval_args.seed, "RNG seed");

    CurveArgs curve_args;
    auto* cmd_curve = app.add_subcommand("learning-curve", "holdout learning curve");
    cmd_curve->add_option("--features", curve_args.features)->required();
    cmd_curve->add_option("--kernel", curve_args.kernel, "kernel expression");
    cmd_curve->add_option("--cv", curve_args.cv, "kf | sgkf");
    cmd_curve->add_option("--folds", curve_args.folds, "CV folds");
    cmd_curve->add_option("--sizes", curve_args.sizes, "training sizes");
    cmd_curve->add_option("--out", curve_args.out_path, "report JSON")->required();
    cmd_curve->add_option("--svg", curve_args.svg_path, "curve SVG");
    cmd_curve->add_option("--seed", curve_args.seed, "RNG seed");

    ImportanceArgs imp_args;
    auto* cmd_imp = app.add_subcommand("importance", "permutation feature importance");
    cmd_imp->add_option("--features", imp_args.features)->required();
    cmd_imp->add_option("--model", imp_args.model)->required();
    cmd_imp->add_option("--out", imp_args.out_path, "report JSON")->required();
    cmd_imp->add_option("--svg", imp_args.svg_path, "bar chart SVG");
    cmd_imp->add_option("--repeats", imp_args.repeats, "permutation repeats");
    cmd_imp->add_option("--seed", imp_args.seed, "RNG seed");

    PipelineArgs pipe_args;
    auto* cmd_pipe = app.add_subcommand("pipeline", "full filter/split/search/eval chain");
    cmd_pipe->add_option("--manifest", pipe_args.manifest)->required();
    cmd_pipe->add_option("--out", pipe_args.out_dir, "output directory");
    cmd_pipe->add_option("--features", pipe_args.features, "spectra | raw");
    cmd_pipe->add_option("--cv", pipe_args.cv, "kf | sgkf");
    cmd_pipe->add_option("--channels", pipe_args.channels, "channel mask");
    cmd_pipe->add_option("--sizes", pipe_args.sizes, "learning-curve sizes");
    cmd_pipe->add_option("--kernel", pipe_args.kernel, "kernel template for the search");
    cmd_pipe->add_option("--mode", pipe_args.mode, "raw features: pad | interpolate");
    cmd_pipe->add_option("--bins", pipe_args.bins, "spectrum bins");
    cmd_pipe->add_option("--len", pipe_args.target_length, "raw target length");
    cmd_pipe->add_option("--folds", pipe_args.folds, "CV folds");
    cmd_pipe->add_option("--search-iters", pipe_args.search_iters, "search iterations");
    cmd_pipe->add_option("--repeats", pipe_args.repeats, "importance repeats");
    cmd_pipe->add_option("--holdout-athletes", pipe_args.holdout_athletes);
    cmd_pipe->add_option("--target-holdout", pipe_args.target_holdout);
    cmd_pipe->add_option("--min-count", pipe_args.min_count, "rare-label threshold");
    cmd_pipe->add_option("--seed", pipe_args.seed, "RNG seed");
    cmd_pipe->add_flag("--no-curve", pipe_args.no_curve, "skip the learning curve");
    cmd_pipe->add_flag("--no-importance", pipe_args.no_importance, "skip importance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    }

    try {
        synth_args.seed_set = synth_seed->count() > 0;
        if (cmd_synth->parsed()) return run_synth(synth_args);
        if (cmd_pre->parsed()) return run_featurize(pre_args, false);
        if (cmd_spec->parsed()) return run_featurize(spec_args, true);
        if (cmd_explore->parsed()) return run_explore(explore_args);
        if (cmd_train->parsed()) return run_train(train_args);
        if (cmd_eval->parsed()) return run_evaluate(eval_args);
        if (cmd_curve->parsed()) return run_curve(curve_args);
        if (cmd_imp->parsed()) return run_importance(imp_args);
        if (cmd_pipe->parsed()) return run_pipeline_cmd(pipe_args);
    } catch (const acrosense::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const acrosense::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
