#include "acrosense/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "acrosense/core_data.hpp"

namespace acrosense::eval {

std::string scheme_name(CvScheme scheme) {
    return scheme == CvScheme::kKFold ? "kfold" : "stratified_group_kfold";
}

CvScheme scheme_from_name(const std::string& name) {
    if (name == "kfold" || name == "kf") return CvScheme::kKFold;
    if (name == "stratified_group_kfold" || name == "sgkf") {
        return CvScheme::kStratifiedGroupKFold;
    }
    throw ValidationError("unknown CV scheme '" + name + "' (use kf or sgkf)");
}

void CvPlan::validate(std::size_t n) const {
    std::vector<int> seen(n, 0);
    for (const auto& fold : folds) {
        std::set<std::size_t> train(fold.train_indices.begin(), fold.train_indices.end());
        for (std::size_t v : fold.val_indices) {
            if (v >= n) throw ValidationError("CvPlan: index out of range");
            if (train.count(v)) throw ValidationError("CvPlan: train/val overlap");
            ++seen[v];
        }
        if (fold.train_indices.size() + fold.val_indices.size() != n) {
            throw ValidationError("CvPlan: fold does not cover all rows");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (seen[i] != 1) {
            throw ValidationError("CvPlan: index " + std::to_string(i) +
                                  " appears in " + std::to_string(seen[i]) +
                                  " validation sets");
        }
    }
}

CvPlan make_kfold(std::size_t n, int k, std::uint64_t seed) {
    if (k < 2) throw ValidationError("make_kfold: k must be >= 2");
    if (static_cast<std::size_t>(k) > n) throw ValidationError("make_kfold: k > n");
    Rng rng(seed);
    const auto perm = rng.permutation(n);

    CvPlan plan;
    plan.scheme = CvScheme::kKFold;
    plan.k = k;
    plan.seed = seed;
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t offset = 0;
    for (int f = 0; f < k; ++f) {
        const std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        CvPlan::Fold fold;
        fold.val_indices.assign(perm.begin() + offset, perm.begin() + offset + len);
        std::sort(fold.val_indices.begin(), fold.val_indices.end());
        std::set<std::size_t> val(fold.val_indices.begin(), fold.val_indices.end());
        for (std::size_t i = 0; i < n; ++i) {
            if (!val.count(i)) fold.train_indices.push_back(i);
        }
        plan.folds.push_back(std::move(fold));
        offset += len;
    }
    return plan;
}

CvPlan make_sgkf(const std::vector<std::string>& labels,
                 const std::vector<std::string>& groups, int k, std::uint64_t seed) {
    if (labels.size() != groups.size()) {
        throw ValidationError("make_sgkf: labels/groups length mismatch");
    }
    if (k < 2) throw ValidationError("make_sgkf: k must be >= 2");
    const std::size_t n = labels.size();

    std::vector<std::string> group_names;
    std::map<std::string, int> group_index;
    for (const auto& g : groups) {
        if (!group_index.count(g)) {
            group_index[g] = static_cast<int>(group_names.size());
            group_names.push_back(g);
        }
    }
    const int n_groups = static_cast<int>(group_names.size());
    if (n_groups < k) {
        throw ValidationError("make_sgkf: fewer groups (" + std::to_string(n_groups) +
                              ") than folds (" + std::to_string(k) + ")");
    }

    std::vector<std::string> label_names;
    std::map<std::string, int> label_index;
    for (const auto& l : labels) {
        if (!label_index.count(l)) {
            label_index[l] = static_cast<int>(label_names.size());
            label_names.push_back(l);
        }
    }
    const int n_labels = static_cast<int>(label_names.size());

    // Per-group label histograms.
    std::vector<std::vector<double>> group_hist(
        static_cast<std::size_t>(n_groups), std::vector<double>(n_labels, 0.0));
    std::vector<int> group_total(static_cast<std::size_t>(n_groups), 0);
    std::vector<double> label_total(static_cast<std::size_t>(n_labels), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int g = group_index[groups[i]];
        const int l = label_index[labels[i]];
        group_hist[g][l] += 1.0;
        ++group_total[g];
        label_total[l] += 1.0;
    }
    std::vector<double> ideal(static_cast<std::size_t>(n_labels));
    for (int l = 0; l < n_labels; ++l) ideal[l] = label_total[l] / k;

    // Largest group first; ties broken by the seeded shuffle order.
    std::vector<int> order(static_cast<std::size_t>(n_groups));
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return group_total[a] > group_total[b]; });

    std::vector<std::vector<double>> fold_counts(
        static_cast<std::size_t>(k), std::vector<double>(n_labels, 0.0));
    std::vector<int> fold_groups(static_cast<std::size_t>(k), 0);
    std::vector<int> assignment(static_cast<std::size_t>(n_groups), -1);
    int empty_folds = k;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const int g = order[static_cast<std::size_t>(pos)];
        const int remaining = n_groups - static_cast<int>(pos);
        const bool must_fill = remaining <= empty_folds;
        int best_fold = -1;
        double best_delta = 0.0;
        for (int f = 0; f < k; ++f) {
            if (must_fill && fold_groups[f] > 0) continue;
            // Change in the global sum of squared deviations from the ideal;
            // only the receiving fold's terms move.
            double delta = 0.0;
            for (int l = 0; l < n_labels; ++l) {
                const double before = fold_counts[f][l] - ideal[l];
                const double after = before + group_hist[g][l];
                delta += after * after - before * before;
            }
            if (best_fold < 0 || delta < best_delta) {
                best_fold = f;
                best_delta = delta;
            }
        }
        assignment[g] = best_fold;
        if (fold_groups[best_fold] == 0) --empty_folds;
        ++fold_groups[best_fold];
        for (int l = 0; l < n_labels; ++l) fold_counts[best_fold][l] += group_hist[g][l];
    }

    CvPlan plan;
    plan.scheme = CvScheme::kStratifiedGroupKFold;
    plan.k = k;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        const int f = assignment[group_index[groups[i]]];
        for (int other = 0; other < k; ++other) {
            if (other == f) {
                plan.folds[static_cast<std::size_t>(other)].val_indices.push_back(i);
            } else {
                plan.folds[static_cast<std::size_t>(other)].train_indices.push_back(i);
            }
        }
    }
    plan.validate(n);
    return plan;
}

// ---------------------------------------------------------------------------
// Fold evaluation on cached distance blocks

namespace {

Eigen::MatrixXd slice(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                      const std::vector<std::size_t>& cols) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
        }
    }
    return out;
}

struct FoldData {
    Eigen::MatrixXd d2_train;                // train x train squared distances
    Eigen::MatrixXd d2_cross;                // train x val
    std::vector<std::string> train_labels;
    std::vector<std::string> val_labels;
};

struct CvCache {
    std::vector<std::string> label_order;
    std::vector<FoldData> folds;
};

CvCache build_cv_cache(const prep::FeatureMatrix& features, const CvPlan& plan) {
    plan.validate(features.rows());
    if (plan.folds.size() < 2) throw ValidationError("cross_validate: need k >= 2 folds");

    CvCache cache;
    cache.label_order = features.label_set();
    const Eigen::MatrixXd d2 = kernels::pairwise_sqdist_self(features.values);

    for (std::size_t f = 0; f < plan.folds.size(); ++f) {
        const auto& fold = plan.folds[f];
        FoldData fd;
        fd.d2_train = slice(d2, fold.train_indices, fold.train_indices);
        fd.d2_cross = slice(d2, fold.train_indices, fold.val_indices);
        for (std::size_t i : fold.train_indices) {
            fd.train_labels.push_back(features.row_meta[i].label);
        }
        for (std::size_t i : fold.val_indices) {
            fd.val_labels.push_back(features.row_meta[i].label);
        }
        std::set<std::string> present(fd.train_labels.begin(), fd.train_labels.end());
        for (const auto& label : cache.label_order) {
            if (!present.count(label)) {
                throw ValidationError("cross_validate: fold " + std::to_string(f) +
                                      " training partition is missing label '" + label +
                                      "'");
            }
        }
        cache.folds.push_back(std::move(fd));
    }
    return cache;
}

double evaluate_fold(const FoldData& fd, const std::vector<std::string>& label_order,
                     const kernels::KernelSpec& kernel, const gp::FitOptions& options) {
    Eigen::MatrixXd k_train = kernels::eval_from_sqdist(kernel, fd.d2_train);
    k_train.diagonal().array() += options.jitter;

    const Eigen::Index n = k_train.rows();
    std::vector<gp::LaplaceState> states;
    states.reserve(label_order.size());
    for (const auto& label : label_order) {
        Eigen::VectorXi y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y(i) = fd.train_labels[static_cast<std::size_t>(i)] == label ? 1 : -1;
        }
        states.push_back(gp::laplace_fit_binary(k_train, y, options.tol,
                                                options.max_newton));
    }

    const Eigen::MatrixXd k_cross = kernels::eval_from_sqdist(kernel, fd.d2_cross);
    const double diag = kernels::diagonal_value(kernel) + options.jitter;
    const Eigen::MatrixXd probs = gp::predict_probability_matrix(states, k_cross, diag);

    std::size_t hits = 0;
    for (Eigen::Index j = 0; j < probs.rows(); ++j) {
        Eigen::Index best = 0;
        for (Eigen::Index l = 1; l < probs.cols(); ++l) {
            if (probs(j, l) > probs(j, best)) best = l;
        }
        if (label_order[static_cast<std::size_t>(best)] ==
            fd.val_labels[static_cast<std::size_t>(j)]) {
            ++hits;
        }
    }
    return fd.val_labels.empty()
               ? 0.0
               : static_cast<double>(hits) / static_cast<double>(fd.val_labels.size());
}

CvResult summarize(std::vector<double> per_fold) {
    CvResult res;
    res.per_fold = std::move(per_fold);
    const double n = static_cast<double>(res.per_fold.size());
    res.mean_accuracy =
        std::accumulate(res.per_fold.begin(), res.per_fold.end(), 0.0) / n;
    double var = 0.0;
    for (double a : res.per_fold) var += (a - res.mean_accuracy) * (a - res.mean_accuracy);
    res.std_accuracy = std::sqrt(var / n);  // population std across folds
    return res;
}

CvResult cross_validate_cached(const CvCache& cache, const kernels::KernelSpec& kernel,
                               const gp::FitOptions& options) {
    std::vector<double> accs(cache.folds.size(), 0.0);
    std::vector<std::string> errors(cache.folds.size());
    parallel::parallel_for(cache.folds.size(), [&](std::size_t f) {
        try {
            accs[f] = evaluate_fold(cache.folds[f], cache.label_order, kernel, options);
        } catch (const std::exception& e) {
            errors[f] = "fold " + std::to_string(f) + ": " + e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericError(e);
    }
    return summarize(std::move(accs));
}

}  // namespace

CvResult cross_validate(const prep::FeatureMatrix& features,
                        const kernels::KernelSpec& kernel, const CvPlan& plan,
                        const gp::FitOptions& options) {
    const CvCache cache = build_cv_cache(features, plan);
    return cross_validate_cached(cache, kernel, options);
}

void SearchSpace::validate() const {
    if (!kernel_template) throw ValidationError("SearchSpace: missing kernel template");
    if (iterations < 1) throw ValidationError("SearchSpace: iterations must be >= 1");
    if (!(constant_lo < constant_hi) || !(length_lo < length_hi) ||
        !(alpha_lo < alpha_hi) || !(constant_lo > 0) || !(length_lo > 0) ||
        !(alpha_lo > 0)) {
        throw ValidationError("SearchSpace: ranges must satisfy 0 < lo < hi");
    }
}

namespace {

kernels::KernelSpec draw_candidate(const kernels::KernelSpec& node,
                                   const SearchSpace& space, Rng& rng) {
    using Kind = kernels::KernelNode::Kind;
    switch (node->kind) {
        case Kind::kConstant:
            return kernels::constant(rng.log_uniform(space.constant_lo, space.constant_hi));
        case Kind::kRbf:
            return kernels::rbf(rng.log_uniform(space.length_lo, space.length_hi));
        case Kind::kMatern:
            return kernels::matern(rng.log_uniform(space.length_lo, space.length_hi),
                                   node->nu);
        case Kind::kRationalQuadratic: {
            const double l = rng.log_uniform(space.length_lo, space.length_hi);
            const double a = rng.log_uniform(space.alpha_lo, space.alpha_hi);
            return kernels::rational_quadratic(l, a);
        }
        case Kind::kSum: {
            auto left = draw_candidate(node->left, space, rng);
            auto right = draw_candidate(node->right, space, rng);
            return kernels::sum(std::move(left), std::move(right));
        }
        case Kind::kProduct: {
            auto left = draw_candidate(node->left, space, rng);
            auto right = draw_candidate(node->right, space, rng);
            return kernels::product(std::move(left), std::move(right));
        }
    }
    throw ValidationError("draw_candidate: corrupt kernel node");
}

}  // namespace

SearchResult random_search(const prep::FeatureMatrix& features, const SearchSpace& space,
                           const CvPlan& plan, const gp::FitOptions& options) {
    space.validate();
    const CvCache cache = build_cv_cache(features, plan);

    Rng rng(space.seed);
    std::vector<kernels::KernelSpec> specs;
    specs.reserve(static_cast<std::size_t>(space.iterations));
    for (int i = 0; i < space.iterations; ++i) {
        specs.push_back(draw_candidate(space.kernel_template, space, rng));
    }

    const std::size_t n_tasks = specs.size() * cache.folds.size();
    std::vector<double> fold_acc(n_tasks, 0.0);
    std::vector<std::string> errors(n_tasks);
    parallel::parallel_for(n_tasks, [&](std::size_t t) {
        const std::size_t c = t / cache.folds.size();
        const std::size_t f = t % cache.folds.size();
        try {
            fold_acc[t] = evaluate_fold(cache.folds[f], cache.label_order, specs[c],
                                        options);
        } catch (const std::exception& e) {
            errors[t] = "candidate " + std::to_string(c) + " fold " + std::to_string(f) +
                        ": " + e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericError(e);
    }

    SearchResult result;
    for (std::size_t c = 0; c < specs.size(); ++c) {
        std::vector<double> accs(cache.folds.size());
        for (std::size_t f = 0; f < cache.folds.size(); ++f) {
            accs[f] = fold_acc[c * cache.folds.size() + f];
        }
        result.candidates.push_back({specs[c], summarize(std::move(accs))});
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < result.candidates.size(); ++c) {
        if (result.candidates[c].cv.mean_accuracy >
            result.candidates[best].cv.mean_accuracy) {
            best = c;  // strict: ties keep the earliest draw
        }
    }
    result.best_kernel = result.candidates[best].kernel;
    result.best_cv = result.candidates[best].cv;
    return result;
}

std::vector<CurvePoint> learning_curve(const prep::FeatureMatrix& train,
                                       const prep::FeatureMatrix& holdout,
                                       const kernels::KernelSpec& kernel,
                                       const std::vector<int>& sizes, CvScheme scheme,
                                       int k, std::uint64_t seed,
                                       const gp::FitOptions& options) {
    const std::size_t n = train.rows();
    if (sizes.empty()) throw ValidationError("learning_curve: no sizes given");
    for (int s : sizes) {
        if (s < k) throw ValidationError("learning_curve: size below fold count");
        if (static_cast<std::size_t>(s) > n) {
            throw ValidationError("learning_curve: size " + std::to_string(s) +
                                  " exceeds training rows");
        }
    }
    if (holdout.rows() == 0) throw ValidationError("learning_curve: empty holdout");
    if (holdout.cols() != train.cols()) {
        throw ValidationError("learning_curve: feature dimension mismatch");
    }

    Rng rng(seed);
    const auto shuffle = rng.permutation(n);
    const auto full_labels = train.label_set();

    // Distances computed once; every size/fold slices them.
    const Eigen::MatrixXd d2_self = kernels::pairwise_sqdist_self(train.values);
    const Eigen::MatrixXd d2_cross = kernels::pairwise_sqdist(train.values, holdout.values);
    const double diag = kernels::diagonal_value(kernel) + options.jitter;

    std::vector<std::string> holdout_labels;
    holdout_labels.reserve(holdout.rows());
    for (const auto& m : holdout.row_meta) holdout_labels.push_back(m.label);

    std::vector<CurvePoint> points;
    for (int size : sizes) {
        CurvePoint point;
        point.train_size = size;

        std::vector<std::size_t> prefix(shuffle.begin(), shuffle.begin() + size);
        std::vector<std::string> prefix_labels, prefix_groups;
        for (std::size_t idx : prefix) {
            prefix_labels.push_back(train.row_meta[idx].label);
            prefix_groups.push_back(train.row_meta[idx].athlete_id);
        }

        {
            std::set<std::string> present(prefix_labels.begin(), prefix_labels.end());
            if (present.size() != full_labels.size()) {
                point.degenerate = true;
                point.note = "subset is missing labels";
                points.push_back(std::move(point));
                continue;
            }
        }

        const std::uint64_t sub_seed = mix_seed(seed, static_cast<std::uint64_t>(size));
        CvPlan plan;
        try {
            if (scheme == CvScheme::kKFold) {
                plan = make_kfold(static_cast<std::size_t>(size), k, sub_seed);
            } else {
                plan = make_sgkf(prefix_labels, prefix_groups, k, sub_seed);
            }
        } catch (const ValidationError& e) {
            point.degenerate = true;
            point.note = e.what();
            points.push_back(std::move(point));
            continue;
        }

        bool covered = true;
        for (const auto& fold : plan.folds) {
            std::set<std::string> present;
            for (std::size_t i : fold.train_indices) present.insert(prefix_labels[i]);
            if (present.size() != full_labels.size()) covered = false;
        }
        if (!covered) {
            point.degenerate = true;
            point.note = "a fold's training partition is missing labels";
            points.push_back(std::move(point));
            continue;
        }

        std::vector<double> accs(plan.folds.size(), 0.0);
        std::vector<std::string> errors(plan.folds.size());
        parallel::parallel_for(plan.folds.size(), [&](std::size_t f) {
            try {
                const auto& fold = plan.folds[f];
                std::vector<std::size_t> rows;  // original row indices of fold train
                rows.reserve(fold.train_indices.size());
                for (std::size_t i : fold.train_indices) rows.push_back(prefix[i]);

                Eigen::MatrixXd k_train(static_cast<Eigen::Index>(rows.size()),
                                        static_cast<Eigen::Index>(rows.size()));
                for (std::size_t a = 0; a < rows.size(); ++a) {
                    for (std::size_t b = 0; b < rows.size(); ++b) {
                        k_train(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                            d2_self(static_cast<Eigen::Index>(rows[a]),
                                    static_cast<Eigen::Index>(rows[b]));
                    }
                }
                k_train = kernels::eval_from_sqdist(kernel, k_train);
                k_train.diagonal().array() += options.jitter;

                std::vector<gp::LaplaceState> states;
                for (const auto& label : full_labels) {
                    Eigen::VectorXi y(static_cast<Eigen::Index>(rows.size()));
                    for (std::size_t a = 0; a < rows.size(); ++a) {
                        y(static_cast<Eigen::Index>(a)) =
                            train.row_meta[rows[a]].label == label ? 1 : -1;
                    }
                    states.push_back(gp::laplace_fit_binary(k_train, y, options.tol,
                                                            options.max_newton));
                }

                Eigen::MatrixXd k_cross(static_cast<Eigen::Index>(rows.size()),
                                        d2_cross.cols());
                for (std::size_t a = 0; a < rows.size(); ++a) {
                    k_cross.row(static_cast<Eigen::Index>(a)) =
                        d2_cross.row(static_cast<Eigen::Index>(rows[a]));
                }
                k_cross = kernels::eval_from_sqdist(kernel, k_cross);
                const Eigen::MatrixXd probs =
                    gp::predict_probability_matrix(states, k_cross, diag);

                std::size_t hits = 0;
                for (Eigen::Index j = 0; j < probs.rows(); ++j) {
                    Eigen::Index best = 0;
                    for (Eigen::Index l = 1; l < probs.cols(); ++l) {
                        if (probs(j, l) > probs(j, best)) best = l;
                    }
                    if (full_labels[static_cast<std::size_t>(best)] ==
                        holdout_labels[static_cast<std::size_t>(j)]) {
                        ++hits;
                    }
                }
                accs[f] = static_cast<double>(hits) /
                          static_cast<double>(holdout_labels.size());
            } catch (const std::exception& e) {
                errors[f] = e.what();
            }
        });
        for (const auto& e : errors) {
            if (!e.empty()) throw NumericError("learning_curve size " +
                                               std::to_string(size) + ": " + e);
        }

        const CvResult res = summarize(std::move(accs));
        point.mean_accuracy = res.mean_accuracy;
        point.std_accuracy = res.std_accuracy;
        point.fold_accuracies = res.per_fold;
        points.push_back(std::move(point));
    }
    return points;
}

std::vector<ChannelImportance> permutation_importance(const gp::TrainedModel& model,
                                                      const prep::FeatureMatrix& holdout,
                                                      int repeats, std::uint64_t seed) {
    if (holdout.rows() == 0) throw ValidationError("permutation_importance: empty holdout");
    if (repeats < 1) throw ValidationError("permutation_importance: repeats must be >= 1");

    const double baseline = gp::accuracy(model, holdout);
    const auto& channels = holdout.feature_layout.channels;
    const std::size_t m = holdout.rows();

    std::vector<std::string> truth;
    truth.reserve(m);
    for (const auto& meta : holdout.row_meta) truth.push_back(meta.label);

    const std::size_t n_tasks = channels.size() * static_cast<std::size_t>(repeats);
    std::vector<double> drops(n_tasks, 0.0);
    std::vector<std::string> errors(n_tasks);
    parallel::parallel_for(n_tasks, [&](std::size_t t) {
        try {
            const std::size_t block = t / static_cast<std::size_t>(repeats);
            const std::size_t rep = t % static_cast<std::size_t>(repeats);
            Rng rng(mix_seed(seed, channels[block], rep));
            const auto perm = rng.permutation(m);

            Eigen::MatrixXd values = holdout.values;
            const auto [lo, hi] = holdout.block_range(static_cast<int>(block));
            for (std::size_t j = 0; j < m; ++j) {
                values.block(static_cast<Eigen::Index>(j), lo, 1, hi - lo) =
                    holdout.values.block(static_cast<Eigen::Index>(perm[j]), lo, 1,
                                         hi - lo);
            }
            const auto predicted = gp::predict_labels(model, values);
            std::size_t hits = 0;
            for (std::size_t j = 0; j < m; ++j) {
                if (predicted[j] == truth[j]) ++hits;
            }
            const double acc = static_cast<double>(hits) / static_cast<double>(m);
            drops[t] = baseline - acc;
        } catch (const std::exception& e) {
            errors[t] = e.what();
        }
    });
    for (const auto& e : errors) {
        if (!e.empty()) throw NumericError(std::string("permutation_importance: ") + e);
    }

    std::vector<ChannelImportance> out;
    for (std::size_t b = 0; b < channels.size(); ++b) {
        ChannelImportance ci;
        ci.channel = channels[b];
        ci.name = data::kChannelNames[static_cast<std::size_t>(channels[b])];
        ci.drops.assign(drops.begin() + static_cast<std::ptrdiff_t>(b * repeats),
                        drops.begin() + static_cast<std::ptrdiff_t>((b + 1) * repeats));
        const double n_rep = static_cast<double>(repeats);
        ci.mean_drop = std::accumulate(ci.drops.begin(), ci.drops.end(), 0.0) / n_rep;
        double var = 0.0;
        for (double d : ci.drops) var += (d - ci.mean_drop) * (d - ci.mean_drop);
        ci.std_drop = std::sqrt(var / n_rep);
        out.push_back(std::move(ci));
    }
    return out;
}

Eigen::MatrixXi confusion_matrix(const std::vector<std::string>& true_labels,
                                 const std::vector<std::string>& predicted_labels,
                                 const std::vector<std::string>& label_order) {
    if (true_labels.size() != predicted_labels.size()) {
        throw ValidationError("confusion_matrix: length mismatch");
    }
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < label_order.size(); ++i) {
        index[label_order[i]] = static_cast<int>(i);
    }
    const auto n = static_cast<Eigen::Index>(label_order.size());
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(n, n);
    for (std::size_t i = 0; i < true_labels.size(); ++i) {
        const auto ti = index.find(true_labels[i]);
        const auto pi = index.find(predicted_labels[i]);
        if (ti == index.end()) {
            throw ValidationError("confusion_matrix: unknown true label '" +
                                  true_labels[i] + "'");
        }
        if (pi == index.end()) {
            throw ValidationError("confusion_matrix: unknown predicted label '" +
                                  predicted_labels[i] + "'");
        }
        ++counts(ti->second, pi->second);
    }
    return counts;
}

// ---------------------------------------------------------------------------
// Report emission (hand-rolled writer: fixed key order, %.17g floats)

namespace {

class JsonOut {
public:
    void raw(const std::string& s) { out_ += s; }
    void str(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default: out_ += c;
            }
        }
        out_ += '"';
    }
    void num(double v) { out_ += format_double(v); }
    void num(long long v) { out_ += std::to_string(v); }
    const std::string& text() const { return out_; }

private:
    std::string out_;
};

void kernel_json_rec(const kernels::KernelSpec& spec, JsonOut& j) {
    using Kind = kernels::KernelNode::Kind;
    switch (spec->kind) {
        case Kind::kConstant:
            j.raw("{\"kind\":\"constant\",\"c\":");
            j.num(spec->value);
            j.raw("}");
            break;
        case Kind::kRbf:
            j.raw("{\"kind\":\"rbf\",\"l\":");
            j.num(spec->length_scale);
            j.raw("}");
            break;
        case Kind::kMatern:
            j.raw("{\"kind\":\"matern\",\"l\":");
            j.num(spec->length_scale);
            j.raw(",\"nu\":");
            j.num(spec->nu);
            j.raw("}");
            break;
        case Kind::kRationalQuadratic:
            j.raw("{\"kind\":\"rational_quadratic\",\"l\":");
            j.num(spec->length_scale);
            j.raw(",\"a\":");
            j.num(spec->alpha);
            j.raw("}");
            break;
        case Kind::kSum:
        case Kind::kProduct:
            j.raw(spec->kind == Kind::kSum ? "{\"kind\":\"sum\",\"left\":"
                                           : "{\"kind\":\"product\",\"left\":");
            kernel_json_rec(spec->left, j);
            j.raw(",\"right\":");
            kernel_json_rec(spec->right, j);
            j.raw("}");
            break;
    }
}

}  // namespace

std::string eval_report_json(const EvalReport& report) {
    JsonOut j;
    j.raw("{\n  \"scheme\": ");
    j.str(report.scheme);
    j.raw(",\n  \"kernel\": {\"expression\": ");
    j.str(report.kernel_expression);
    j.raw(", \"spec\": ");
    if (report.kernel) {
        kernel_json_rec(report.kernel, j);
    } else {
        j.raw("null");
    }
    j.raw("},\n  \"cv_accuracy_mean\": ");
    j.num(report.cv_accuracy_mean);
    j.raw(",\n  \"cv_accuracy_std\": ");
    j.num(report.cv_accuracy_std);
    j.raw(",\n  \"holdout_accuracy\": ");
    j.num(report.holdout_accuracy);
    j.raw(",\n  \"label_order\": [");
    for (std::size_t i = 0; i < report.label_order.size(); ++i) {
        if (i) j.raw(", ");
        j.str(report.label_order[i]);
    }
    j.raw("],\n  \"confusion_matrix\": [");
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
        if (r) j.raw(", ");
        j.raw("[");
        for (Eigen::Index c = 0; c < report.confusion.cols(); ++c) {
            if (c) j.raw(", ");
            j.num(static_cast<long long>(report.confusion(r, c)));
        }
        j.raw("]");
    }
    j.raw("],\n  \"learning_curve\": [");
    for (std::size_t i = 0; i < report.curve.size(); ++i) {
        const auto& p = report.curve[i];
        if (i) j.raw(", ");
        j.raw("{\"train_size\": ");
        j.num(static_cast<long long>(p.train_size));
        j.raw(", \"mean_accuracy\": ");
        if (p.degenerate) {
            j.raw("null");
        } else {
            j.num(p.mean_accuracy);
        }
        j.raw(", \"std_accuracy\": ");
        if (p.degenerate) {
            j.raw("null");
        } else {
            j.num(p.std_accuracy);
        }
        j.raw(", \"degenerate\": ");
        j.raw(p.degenerate ? "true" : "false");
        if (!p.note.empty()) {
            j.raw(", \"note\": ");
            j.str(p.note);
        }
        j.raw("}");
    }
    j.raw("],\n  \"importance\": [");
    for (std::size_t i = 0; i < report.importance.size(); ++i) {
        const auto& ci = report.importance[i];
        if (i) j.raw(", ");
        j.raw("{\"channel\": ");
        j.str(ci.name);
        j.raw(", \"mean_drop\": ");
        j.num(ci.mean_drop);
        j.raw(", \"std_drop\": ");
        j.num(ci.std_drop);
        j.raw("}");
    }
    j.raw("],\n  \"seed\": ");
    j.num(static_cast<long long>(report.seed));
    j.raw(",\n  \"config\": {");
    for (std::size_t i = 0; i < report.config.size(); ++i) {
        if (i) j.raw(", ");
        j.str(report.config[i].first);
        j.raw(": ");
        j.str(report.config[i].second);
    }
    j.raw("},\n  \"config_hash\": ");
    j.str(report.config_hash);
    j.raw("\n}\n");
    return j.text();
}

void write_eval_json(const EvalReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << eval_report_json(report);
}

void write_confusion_csv(const Eigen::MatrixXi& confusion,
                         const std::vector<std::string>& label_order,
                         const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << "true\\predicted";
    for (const auto& l : label_order) out << ',' << l;
    out << '\n';
    for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
        out << label_order[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < confusion.cols(); ++c) out << ',' << confusion(r, c);
        out << '\n';
    }
}

}  // namespace acrosense::eval
