#include "acrosense/unsupervised.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace acrosense::unsupervised {

Eigen::MatrixXd PcaModel::transform(const Eigen::MatrixXd& x) const {
    if (x.cols() != mean.size()) throw ValidationError("PcaModel: dimension mismatch");
    return (x.rowwise() - mean.transpose()) * components.transpose();
}

PcaModel fit_pca(const Eigen::MatrixXd& x, int q) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    if (n < 2) throw ValidationError("fit_pca: need at least 2 rows");
    const Eigen::Index q_max = std::min<Eigen::Index>(n - 1, d);
    if (q < 1 || q > q_max) {
        throw ValidationError("fit_pca: q must be in [1, " + std::to_string(q_max) + "]");
    }

    PcaModel model;
    model.mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - model.mean.transpose();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();

    // Total variance from the centered data directly; robust when only the
    // leading singular values are requested.
    const double total_var = centered.squaredNorm() / static_cast<double>(n - 1);

    model.components.resize(q, d);
    model.explained_variance.resize(q);
    model.explained_variance_ratio.resize(q);
    for (int i = 0; i < q; ++i) {
        Eigen::VectorXd comp = svd.matrixV().col(i);
        // Largest-magnitude coordinate made positive (first such index wins).
        Eigen::Index arg = 0;
        comp.cwiseAbs().maxCoeff(&arg);
        if (comp(arg) < 0.0) comp = -comp;
        model.components.row(i) = comp.transpose();
        const double ev = s(i) * s(i) / static_cast<double>(n - 1);
        model.explained_variance(i) = ev;
        model.explained_variance_ratio(i) = total_var > 0.0 ? ev / total_var : 0.0;
    }
    return model;
}

namespace {

double squared_dist(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b) {
    return (a - b).squaredNorm();
}

struct LloydResult {
    std::vector<int> assignments;
    Eigen::MatrixXd centroids;
    double inertia = 0.0;
};

LloydResult lloyd_once(const Eigen::MatrixXd& x, int k, Rng& rng) {
    const Eigen::Index n = x.rows();

    // k-means++ seeding.
    Eigen::MatrixXd centroids(k, x.cols());
    std::vector<double> d2(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
    {
        const auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        centroids.row(0) = x.row(first);
        for (int c = 1; c < k; ++c) {
            double total = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                d2[static_cast<std::size_t>(i)] =
                    std::min(d2[static_cast<std::size_t>(i)],
                             squared_dist(x.row(i), centroids.row(c - 1)));
                total += d2[static_cast<std::size_t>(i)];
            }
            Eigen::Index pick = 0;
            if (total > 0.0) {
                const double target = rng.uniform01() * total;
                double acc = 0.0;
                pick = n - 1;
                for (Eigen::Index i = 0; i < n; ++i) {
                    acc += d2[static_cast<std::size_t>(i)];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
            }
            centroids.row(c) = x.row(pick);
        }
    }

    LloydResult res;
    res.assignments.assign(static_cast<std::size_t>(n), 0);
    double prev_inertia = std::numeric_limits<double>::infinity();

    for (int iter = 0; iter < 300; ++iter) {
        // Assignment step.
        double inertia = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = squared_dist(x.row(i), centroids.row(0));
            for (int c = 1; c < k; ++c) {
                const double d = squared_dist(x.row(i), centroids.row(c));
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.assignments[static_cast<std::size_t>(i)] = best;
            inertia += best_d;
        }
        if (inertia > prev_inertia + 1e-9 * (1.0 + prev_inertia)) {
            throw NumericError("kmeans: inertia increased across Lloyd iterations");
        }
        prev_inertia = inertia;
        res.inertia = inertia;

        // Update step.
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(res.assignments[static_cast<std::size_t>(i)]) += x.row(i);
            ++counts[static_cast<std::size_t>(res.assignments[static_cast<std::size_t>(i)])];
        }
        double max_shift = 0.0;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd next;
            if (counts[static_cast<std::size_t>(c)] > 0) {
                next = sums.row(c) / counts[static_cast<std::size_t>(c)];
            } else {
                // Re-seed an emptied cluster at the point farthest from its
                // assigned centroid (lowest index on ties).
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d = squared_dist(
                        x.row(i),
                        centroids.row(res.assignments[static_cast<std::size_t>(i)]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                next = x.row(far);
            }
            max_shift = std::max(max_shift, std::sqrt(squared_dist(next, centroids.row(c))));
            centroids.row(c) = next;
        }
        if (max_shift < 1e-6) break;
    }

    // Final assignment against the converged centroids.
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        int best = 0;
        double best_d = squared_dist(x.row(i), centroids.row(0));
        for (int c = 1; c < k; ++c) {
            const double d = squared_dist(x.row(i), centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        res.assignments[static_cast<std::size_t>(i)] = best;
        inertia += best_d;
    }
    res.inertia = inertia;
    res.centroids = centroids;
    return res;
}

}  // namespace

ClusteringReport kmeans(const Eigen::MatrixXd& projected, int k, std::uint64_t seed) {
    const Eigen::Index n = projected.rows();
    if (k < 1 || k > n) throw ValidationError("kmeans: need 1 <= k <= N");

    const int kRestarts = 10;
    std::vector<LloydResult> results(kRestarts);
    parallel::parallel_for(kRestarts, [&](std::size_t r) {
        Rng rng(mix_seed(seed, r));
        results[r] = lloyd_once(projected, k, rng);
    });
    // Best inertia, ties to the lowest restart index.
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r) {
        if (results[r].inertia < results[best].inertia) best = r;
    }

    ClusteringReport report;
    report.assignments = std::move(results[best].assignments);
    report.centroids = std::move(results[best].centroids);
    report.inertia = results[best].inertia;
    return report;
}

double adjusted_rand_index(const std::vector<int>& labels_a,
                           const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw ValidationError("adjusted_rand_index: length mismatch");
    }
    const std::size_t n = labels_a.size();
    if (n < 2) throw ValidationError("adjusted_rand_index: need at least 2 items");

    std::map<std::pair<int, int>, long long> joint;
    std::map<int, long long> count_a, count_b;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[{labels_a[i], labels_b[i]}];
        ++count_a[labels_a[i]];
        ++count_b[labels_b[i]];
    }
    auto comb2 = [](long long m) -> long double {
        return static_cast<long double>(m) * (m - 1) / 2.0L;
    };
    long double sum_ij = 0.0L, sum_a = 0.0L, sum_b = 0.0L;
    for (const auto& [key, c] : joint) sum_ij += comb2(c);
    for (const auto& [key, c] : count_a) sum_a += comb2(c);
    for (const auto& [key, c] : count_b) sum_b += comb2(c);
    const long double total = comb2(static_cast<long long>(n));

    const long double expected = sum_a * sum_b / total;
    const long double max_index = 0.5L * (sum_a + sum_b);
    if (max_index == expected) return 1.0;  // degenerate: all-singletons / one cluster
    return static_cast<double>((sum_ij - expected) / (max_index - expected));
}

std::vector<int> encode_labels(const std::vector<std::string>& labels) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    std::map<std::string, int> code;
    int next = 0;
    for (const auto& l : distinct) code[l] = next++;
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& l : labels) out.push_back(code[l]);
    return out;
}

}  // namespace acrosense::unsupervised
