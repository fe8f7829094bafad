#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acrosense/feature_matrix.hpp"
#include "acrosense/gp.hpp"
#include "acrosense/kernels.hpp"

namespace acrosense::eval {

enum class CvScheme { kKFold, kStratifiedGroupKFold };

std::string scheme_name(CvScheme scheme);
CvScheme scheme_from_name(const std::string& name);

struct CvPlan {
    CvScheme scheme = CvScheme::kKFold;
    int k = 5;
    std::uint64_t seed = 0;
    struct Fold {
        std::vector<std::size_t> train_indices;
        std::vector<std::size_t> val_indices;
    };
    std::vector<Fold> folds;

    /// Partition property: folds disjoint, validation sets cover 0..n-1 once.
    void validate(std::size_t n) const;
};

/// Seeded shuffle, then k contiguous validation folds with sizes differing by
/// at most one. Requires 2 <= k <= n.
CvPlan make_kfold(std::size_t n, int k, std::uint64_t seed);

/// Stratified group K-fold: groups are atomic; they are assigned largest
/// first (seeded tie-break) to the fold that keeps per-label counts closest
/// to the stratified ideal. No group ever spans train and validation.
CvPlan make_sgkf(const std::vector<std::string>& labels,
                 const std::vector<std::string>& groups, int k, std::uint64_t seed);

struct CvResult {
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population std over folds
    std::vector<double> per_fold;
};

CvResult cross_validate(const prep::FeatureMatrix& features,
                        const kernels::KernelSpec& kernel, const CvPlan& plan,
                        const gp::FitOptions& options = {});

struct SearchSpace {
    kernels::KernelSpec kernel_template;  // hyperparameters get redrawn per candidate
    double constant_lo = 1e-2, constant_hi = 1e5;
    double length_lo = 1e-2, length_hi = 1e3;
    double alpha_lo = 1e-2, alpha_hi = 1e5;
    int iterations = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SearchCandidate {
    kernels::KernelSpec kernel;
    CvResult cv;
};

struct SearchResult {
    kernels::KernelSpec best_kernel;
    CvResult best_cv;
    std::vector<SearchCandidate> candidates;  // in draw order
};

/// Log-uniform candidate draws evaluated by cross-validation; argmax mean
/// accuracy, ties to the earliest draw.
SearchResult random_search(const prep::FeatureMatrix& features, const SearchSpace& space,
                           const CvPlan& plan, const gp::FitOptions& options = {});

struct CurvePoint {
    int train_size = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::vector<double> fold_accuracies;
    bool degenerate = false;
    std::string note;
};

/// Holdout learning curve: one seeded shuffle of the training rows; for each
/// size, a k-fold plan of the chosen scheme on that prefix, one fit per fold,
/// each scored on the holdout set.
std::vector<CurvePoint> learning_curve(const prep::FeatureMatrix& train,
                                       const prep::FeatureMatrix& holdout,
                                       const kernels::KernelSpec& kernel,
                                       const std::vector<int>& sizes, CvScheme scheme,
                                       int k, std::uint64_t seed,
                                       const gp::FitOptions& options = {});

struct ChannelImportance {
    int channel = 0;          // canonical channel index
    std::string name;         // e.g. "gyr_y"
    double mean_drop = 0.0;
    double std_drop = 0.0;
    std::vector<double> drops;
};

/// Permutation importance per sensor channel: the channel's contiguous
/// feature block is row-permuted across the holdout (fresh permutation per
/// repeat), and the accuracy drop against the unpermuted baseline recorded.
std::vector<ChannelImportance> permutation_importance(const gp::TrainedModel& model,
                                                      const prep::FeatureMatrix& holdout,
                                                      int repeats, std::uint64_t seed);

/// Rows = true labels, columns = predicted, both in label_order.
Eigen::MatrixXi confusion_matrix(const std::vector<std::string>& true_labels,
                                 const std::vector<std::string>& predicted_labels,
                                 const std::vector<std::string>& label_order);

struct EvalReport {
    std::string scheme;
    std::string kernel_expression;
    kernels::KernelSpec kernel;
    double cv_accuracy_mean = 0.0;
    double cv_accuracy_std = 0.0;
    double holdout_accuracy = 0.0;
    std::vector<std::string> label_order;
    Eigen::MatrixXi confusion;
    std::vector<CurvePoint> curve;
    std::vector<ChannelImportance> importance;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> config;  // resolved key/values
    std::string config_hash;
};

/// Fixed key order, floats with 17 significant digits; byte-deterministic.
std::string eval_report_json(const EvalReport& report);
void write_eval_json(const EvalReport& report, const std::filesystem::path& path);
void write_confusion_csv(const Eigen::MatrixXi& confusion,
                         const std::vector<std::string>& label_order,
                         const std::filesystem::path& path);

}  // namespace acrosense::eval
