#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

#include "acrosense/common.hpp"

namespace acrosense::kernels {

/// Composition tree over stationary kernel primitives. Immutable once built;
/// nodes are shared freely.
struct KernelNode;
using KernelSpec = std::shared_ptr<const KernelNode>;

struct KernelNode {
    enum class Kind { kConstant, kRbf, kMatern, kRationalQuadratic, kSum, kProduct };

    Kind kind;
    double value = 0.0;         // Constant
    double length_scale = 0.0;  // RBF / Matern / RQ
    double alpha = 0.0;         // RQ
    double nu = 0.0;            // Matern, one of {0.5, 1.5, 2.5}
    KernelSpec left, right;     // Sum / Product
};

KernelSpec constant(double c);
KernelSpec rbf(double length_scale);
KernelSpec matern(double length_scale, double nu);
KernelSpec rational_quadratic(double length_scale, double alpha);
KernelSpec sum(KernelSpec a, KernelSpec b);
KernelSpec product(KernelSpec a, KernelSpec b);

/// Parse the kernel expression grammar:
///   C(v) | RBF(l=..) | M(l=.., nu=..) | RQ(l=.., a=..),
/// combined with infix + and * (with * binding tighter) and parentheses.
KernelSpec parse(const std::string& expression);

/// Canonical rendering; parse(print(k)) reproduces the tree exactly.
std::string print(const KernelSpec& spec);

/// Structural equality (same tree, bit-equal hyperparameters).
bool equal(const KernelSpec& a, const KernelSpec& b);

/// JSON round-trip used by model files and reports.
std::string to_json(const KernelSpec& spec);
KernelSpec from_json(const std::string& json_text);

/// Kernel value as a function of squared Euclidean distance, elementwise.
Eigen::MatrixXd eval_from_sqdist(const KernelSpec& spec, const Eigen::MatrixXd& d2);
double eval_at_sqdist(const KernelSpec& spec, double d2);

/// k(x, x) for stationary compositions (distance zero).
double diagonal_value(const KernelSpec& spec);

/// Pairwise squared Euclidean distances, clipped at zero.
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& x, const Eigen::MatrixXd& z);
/// Self-distance variant with an exactly symmetric result and zero diagonal.
Eigen::MatrixXd pairwise_sqdist_self(const Eigen::MatrixXd& x);

/// Full kernel matrix; uses the symmetric path when X and Z alias.
Eigen::MatrixXd kernel_eval(const KernelSpec& spec, const Eigen::MatrixXd& x,
                            const Eigen::MatrixXd& z);

}  // namespace acrosense::kernels
