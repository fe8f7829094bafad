#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acrosense/feature_matrix.hpp"
#include "acrosense/kernels.hpp"

namespace acrosense::gp {

/// Stable logistic helpers.
double sigmoid(double x);
double log_sigmoid(double x);

/// Gauss-Hermite nodes/weights for weight exp(-x^2) (Golub-Welsch).
struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};
GaussHermite gauss_hermite(int n);

/// Posterior state of one binary Laplace fit.
struct LaplaceState {
    Eigen::VectorXd mode;        // f_hat
    Eigen::VectorXd sqrt_w;      // W^{1/2} diagonal at the mode
    Eigen::MatrixXd chol_lower;  // L with L L^T = I + W^{1/2} K W^{1/2}
    Eigen::VectorXd dual;        // a = K^{-1} f_hat
    Eigen::VectorXd grad;        // t - sigmoid(f_hat), the likelihood gradient
    double log_marginal_likelihood = 0.0;
};

/// Newton iteration to the mode of the logistic-likelihood posterior.
/// y entries must be +-1 with both classes present; K is the (already
/// jittered) training kernel matrix. Stops when the objective change drops
/// below tol and the posterior gradient is stationary. On a Cholesky failure
/// the diagonal is raised once by 1e-6 before giving up.
LaplaceState laplace_fit_binary(const Eigen::MatrixXd& k, const Eigen::VectorXi& y,
                                double tol = 1e-8, int max_newton = 100);

/// sigma(f) integrated against N(mean, var) with 33-node Gauss-Hermite.
double predictive_probability(double mean, double var);

/// Per-label one-vs-rest probabilities for m test points, renormalized to sum
/// to one per row. k_cross is the n x m train/test kernel block and
/// diag_value the stationary k(x*,x*) + jitter.
Eigen::MatrixXd predict_probability_matrix(const std::vector<LaplaceState>& states,
                                           const Eigen::MatrixXd& k_cross,
                                           double diag_value);

struct TrainedModel {
    kernels::KernelSpec kernel;
    std::vector<std::string> label_order;
    std::vector<LaplaceState> states;  // one per label
    Eigen::MatrixXd train_features;    // n x D, already normalized
    std::vector<prep::ChannelStats> norm_stats;
    prep::FeatureLayout feature_layout;
    double jitter = 1e-10;

    double summed_lml() const;
};

struct FitOptions {
    bool optimize_lml = false;
    double jitter = 1e-10;
    double tol = 1e-8;
    int max_newton = 100;
    std::uint64_t seed = 0;
};

/// One-vs-rest ensemble: builds the kernel matrix once, runs one Laplace fit
/// per label. With optimize_lml set, hill-climbs the summed log marginal
/// likelihood over log-hyperparameters (forward differences, backtracking,
/// at most 50 accepted steps, never accepting a decrease).
TrainedModel fit(const prep::FeatureMatrix& features, const kernels::KernelSpec& kernel,
                 const FitOptions& options = {});

/// Probability matrix for already-normalized feature rows.
Eigen::MatrixXd predict_proba(const TrainedModel& model, const Eigen::MatrixXd& x);

/// Same, with a normalization-statistics hash check against the model.
Eigen::MatrixXd predict_proba(const TrainedModel& model, const prep::FeatureMatrix& fm);

/// argmax labels (ties broken by label_order position).
std::vector<std::string> predict_labels(const TrainedModel& model,
                                        const Eigen::MatrixXd& x);

double accuracy(const TrainedModel& model, const prep::FeatureMatrix& fm);

/// Binary model container "ACM1". Serialization is byte-deterministic.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string serialize_model(const TrainedModel& model);

}  // namespace acrosense::gp
