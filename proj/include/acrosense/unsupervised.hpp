#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "acrosense/common.hpp"
#include "acrosense/feature_matrix.hpp"

namespace acrosense::unsupervised {

struct PcaModel {
    Eigen::VectorXd mean;                      // D
    Eigen::MatrixXd components;                // q x D, orthonormal rows
    Eigen::VectorXd explained_variance;        // q, descending
    Eigen::VectorXd explained_variance_ratio;  // q, shares of total variance

    Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;
};

struct ClusteringReport {
    std::vector<int> assignments;  // N
    Eigen::MatrixXd centroids;     // k x q
    double inertia = 0.0;
    double ari = std::numeric_limits<double>::quiet_NaN();  // filled by caller
};

/// PCA by SVD of the mean-centered data. Sign convention: the
/// largest-magnitude entry of each component is positive.
PcaModel fit_pca(const Eigen::MatrixXd& x, int q);

inline PcaModel fit_pca(const prep::FeatureMatrix& fm, int q) {
    return fit_pca(fm.values, q);
}

/// Lloyd k-means with k-means++ seeding: 10 restarts, up to 300 iterations
/// each, stop when the max centroid shift drops below 1e-6. Best inertia wins,
/// ties broken by lowest restart index. An emptied cluster is re-seeded at the
/// point farthest from its assigned centroid.
ClusteringReport kmeans(const Eigen::MatrixXd& projected, int k, std::uint64_t seed);

/// Adjusted Rand index (Hubert-Arabie). Degenerate partitions where the
/// expected index equals the maximum index score 1.0.
double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b);

/// Map arbitrary string labels onto dense integer codes (sorted order).
std::vector<int> encode_labels(const std::vector<std::string>& labels);

}  // namespace acrosense::unsupervised
