#pragma once

#include <vector>

#include <Eigen/Dense>

#include "despeckle/function_class.hpp"
#include "despeckle/kernel_lpe.hpp"
#include "despeckle/noise_models.hpp"

// The de-speckling estimator (debiased-square LPE followed by a clamped
// square root), the denoising baseline LPE, the rate-optimal bandwidth
// selectors, and the scalar MLE for the constant-signal model.

namespace despeckle {

/// A fitted curve on an evaluation grid.
struct EstimateCurve {
    Eigen::VectorXd grid;
    Eigen::VectorXd values;      ///< f-hat, clamped to [h_floor, 1]
    Eigen::VectorXd gsq_values;  ///< raw LPE output (g-hat for despeckle)
    LpeConfig config;
};

/// Uniform midpoint grid (i + 1/2)/size, i = 0..size-1.
Eigen::VectorXd uniform_grid(int size);

/// Precomputed weight segments over a grid, reusable across trials that
/// share (n, h, degree). Numbers are identical to per-point lpe_weights.
struct WeightTable {
    Eigen::VectorXd grid;
    LpeConfig config;
    std::vector<WeightSegment> rows;

    static WeightTable build(const Eigen::VectorXd& grid, const LpeConfig& cfg);

    /// sum_i responses_i W_i(grid_j) for every grid point.
    Eigen::VectorXd apply(const Eigen::VectorXd& responses) const;
};

/// g-hat(x) = sum_i (y_i^2 - sigma^2) W_i(x), the debiased-square LPE
/// estimate of g = f^2. Warns on stderr when obs is not a speckle sample.
double despeckle_gsq(const ObservationSet& obs, double x, const LpeConfig& cfg);

/// De-speckling curve: f-hat = sqrt(clamp(g-hat, h_floor^2, 1)).
EstimateCurve despeckle_estimate(const ObservationSet& obs, const Eigen::VectorXd& grid,
                                 const HolderSpec& spec, double bandwidth);

/// Denoising baseline: f-hat = clamp(sum_i y_i W_i(x), h_floor, 1).
/// Warns on stderr when obs is not an additive-only sample.
EstimateCurve denoise_estimate(const ObservationSet& obs, const Eigen::VectorXd& grid,
                               const HolderSpec& spec, double bandwidth);

/// Curve variants over a prebuilt weight table (same numbers).
EstimateCurve despeckle_estimate(const ObservationSet& obs, const WeightTable& table,
                                 const HolderSpec& spec);
EstimateCurve denoise_estimate(const ObservationSet& obs, const WeightTable& table,
                               const HolderSpec& spec);

/// L2-rate bandwidth (max(1, sigma^4)/n)^(1/(2 beta + 1)), capped at 1/2
/// and floored at (k+1)/n.
double bandwidth_l2(int n, double sigma, double beta);

/// Sup-rate bandwidth (max(1, sigma^4) log(n)/n)^(1/(2 beta + 1)), same
/// cap and floor. Warns when sigma^4 >= n^0.9 (outside the sup-rate regime).
double bandwidth_sup(int n, double sigma, double beta);

/// Additive-model bandwidth (sigma^2/n)^(1/(2 beta + 1)), same cap/floor.
double bandwidth_l2_additive(int n, double sigma, double beta);

/// Additive-model sup-rate bandwidth (sigma^2 log(n)/n)^(1/(2 beta + 1)).
double bandwidth_sup_additive(int n, double sigma, double beta);

/// MLE of theta in y_i = theta xi_i + tau_i:
/// sqrt(max(0, mean(y^2) - sigma^2)).
double scalar_mle(const Eigen::VectorXd& ys, double sigma);

}  // namespace despeckle
