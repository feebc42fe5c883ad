#pragma once

#include <Eigen/Dense>

#include "despeckle/errors.hpp"

// Local polynomial regression machinery on the equispaced design
// x_i = i/n, i = 1..n: the box kernel, monomial feature vector
// U(u) = (1, u, u^2/2!, ..., u^k/k!), the kernel-weighted design matrix
// and the evaluation weights shared by every estimator in this library.

namespace despeckle {

enum class KernelKind { BoxHalf };

/// Compactly supported kernel; currently only K(u) = 1/2 on |u| <= 1.
struct Kernel {
    KernelKind kind = KernelKind::BoxHalf;
    double support_radius = 1.0;
};

/// K(u). The support boundary |u| = support_radius is included.
double kernel_eval(const Kernel& k, double u);

/// Largest integer strictly less than beta (the local fit degree).
int degree_for_beta(double beta);

/// Configuration of one local polynomial fit.
struct LpeConfig {
    int degree_k = 0;       ///< local polynomial degree, >= 0
    double bandwidth_h = 0; ///< window half-width, in (0, 1]
    int n = 0;              ///< number of design points i/n
    double sigma = 0.0;     ///< additive-noise standard deviation
    Kernel kernel{};

    /// Throws std::invalid_argument unless degree_k >= 0, 0 < h <= 1,
    /// sigma >= 0 and n*h >= degree_k + 1.
    void validate() const;
};

/// U(u) = (1, u, u^2/2!, ..., u^k/k!).
Eigen::VectorXd feature_vector(double u, int k);

/// Kernel-weighted moment matrix at x, normalized by 1/(n h):
///   B = 1/(n h) * sum_i U(u_i) U(u_i)^T K(u_i),  u_i = (i/n - x)/h.
/// The normalization makes the weight identities below hold exactly.
/// Throws SingularDesign when the smallest eigenvalue is below 1e-10.
Eigen::MatrixXd design_matrix(double x, const LpeConfig& cfg);

/// Evaluation weights at one point.
struct WeightRow {
    double x = 0;
    Eigen::VectorXd weights;  ///< length n, W_i(x)

    double sum() const { return weights.sum(); }
};

/// W_i(x) = 1/(n h) * U(0)^T B^{-1} U(u_i) K(u_i). The weights sum to one,
/// annihilate the moments (i/n - x)^r for r = 1..k, and reproduce any
/// polynomial of degree <= k exactly.
WeightRow lpe_weights(double x, const LpeConfig& cfg);

/// Compact form of a weight row: only the in-window coefficients.
/// `first` is the 1-based design index of w[0]. Entries outside the
/// window are zero. Identical numbers to lpe_weights.
struct WeightSegment {
    double x = 0;
    int first = 1;
    Eigen::VectorXd w;
};

WeightSegment lpe_weight_segment(double x, const LpeConfig& cfg);

/// sum_i responses_i * W_i(x). Throws std::invalid_argument on a length
/// mismatch and propagates SingularDesign.
double lpe_apply(const Eigen::VectorXd& responses, double x, const LpeConfig& cfg);

/// Same inner product against precomputed weights.
double lpe_apply(const Eigen::VectorXd& responses, const WeightRow& row);

}  // namespace despeckle
