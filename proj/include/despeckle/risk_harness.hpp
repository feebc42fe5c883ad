#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "despeckle/estimators.hpp"
#include "despeckle/function_class.hpp"

// Monte Carlo estimation of L2 and sup-norm risks, log-log rate fitting
// against the theoretical exponents, and sigma-regime sweeps comparing the
// de-speckling estimator with the denoising baseline.
//
// Determinism contract: a (master seed, config) pair fixes every output
// bit-exactly, independent of the worker count. Trials draw from seeds
// derived per trial index and are reduced in index order.

namespace despeckle {

enum class Loss { L2, Sup };
enum class EstimatorKind { Despeckle, Denoise };

/// How sigma_n varies with n across a sweep.
struct SigmaRule {
    enum class Kind { Fixed, Power };
    Kind kind = Kind::Fixed;
    double value = 1.0;  ///< sigma for Fixed, the exponent a for Power

    double sigma_at(int n) const;
    std::string describe() const;
};

/// Monte Carlo risk at one (n, sigma).
struct RiskPoint {
    int n = 0;
    double sigma = 0.0;
    int trials = 0;
    double risk_l2 = 0.0;   ///< mean of ||f-hat - f||_2^2
    double risk_sup = 0.0;  ///< mean of ||f-hat - f||_inf
    double se_l2 = 0.0;
    double se_sup = 0.0;
    double bandwidth = 0.0;
};

/// OLS fit of log risk against log n (log(n/log n) for sup loss).
struct RateFit {
    std::vector<std::pair<double, double>> points;  ///< (log x, log risk)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theoretical_slope = 0.0;
    Loss loss = Loss::L2;
};

/// Midpoint-rule quadrature of (f-hat - f)^2 over the curve grid.
double l2_risk(const FunctionHandle& f, const EstimateCurve& curve);

/// max over the grid of |f-hat - f|.
double sup_risk(const FunctionHandle& f, const EstimateCurve& curve);

struct McConfig {
    int grid_size = 512;
    double bandwidth_multiplier = 1.0;
    int workers = 0;  ///< 0 = hardware concurrency
};

/// Runs `trials` independent trials of the chosen estimator on fresh
/// samples of f and averages both losses. The bandwidth comes from the
/// selector matching (estimator, loss). Both risk columns are filled;
/// `loss` only picks the bandwidth rule.
RiskPoint mc_risk(const FunctionHandle& f, EstimatorKind estimator, int n, double sigma,
                  int trials, std::uint64_t seed, Loss loss, const McConfig& cfg = {});

/// Theoretical log-log slope for the estimator/loss under the sigma rule.
double theoretical_slope(Loss loss, EstimatorKind estimator, double beta, const SigmaRule& rule);

/// OLS rate fit of a risk curve. Warns to stderr when there are fewer
/// than 4 points or they span less than two decades of n.
RateFit rate_fit(const std::vector<RiskPoint>& points, Loss loss, double beta,
                 const SigmaRule& rule, EstimatorKind estimator = EstimatorKind::Despeckle);

/// Smooth bump-mixture member of Sigma_h(beta, L) used by the rate
/// experiments; range [h_floor, 1 - margin].
struct RateTestFunctionParams {
    double margin = 0.10;
    std::vector<double> widths = {1.4, 0.9};
    std::vector<double> centers = {0.45, 0.80};
    std::vector<double> coefs = {1.0, 0.45};
};

FunctionHandle make_rate_test_function(double beta, double L, double h_floor,
                                       const RateTestFunctionParams& params = {});

/// The easy control f == (1 + h_floor)/2.
FunctionHandle make_constant_function(double beta, double L, double h_floor);

/// Despeckle-vs-denoise comparison across sample sizes under one rule.
struct RegimeReport {
    double beta = 0.0;
    double L = 0.0;
    double h_floor = 0.0;
    SigmaRule rule;
    Loss loss = Loss::L2;
    int trials = 0;
    std::uint64_t seed = 0;
    std::string test_function;
    std::vector<RiskPoint> despeckle_points;
    std::vector<RiskPoint> denoise_points;
    RateFit despeckle_fit;
    RateFit denoise_fit;

    double slope_gap() const { return despeckle_fit.slope - denoise_fit.slope; }
};

RegimeReport regime_sweep(double beta, double L, double h_floor, const std::vector<int>& ns,
                          const SigmaRule& rule, int trials, std::uint64_t seed,
                          Loss loss = Loss::L2, const McConfig& cfg = {},
                          const RateTestFunctionParams& params = {});

/// Monte Carlo check of the scalar MLE against its delta-method variance
/// 2 (theta0^2 + sigma^2)^2 / (4 theta0^2) for sqrt(n) (theta-hat - theta0).
struct MleCheck {
    double theta0 = 0.0;
    double sigma = 0.0;
    int n = 0;
    int trials = 0;
    double sample_variance = 0.0;
    double oracle_variance = 0.0;
    double mean_estimate = 0.0;

    double ratio() const { return sample_variance / oracle_variance; }
};

MleCheck mle_delta_method_check(double theta0, double sigma, int n, int trials,
                                std::uint64_t seed, int workers = 0);

}  // namespace despeckle
