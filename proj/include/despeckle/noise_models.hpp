#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "despeckle/function_class.hpp"

// Seedable samplers for the two observation models:
//   speckle:  y_i = f(i/n) xi_i + tau_i,  xi ~ N(0,1), tau ~ N(0, sigma^2)
//   additive: y_i = f(i/n) + sigma w_i,   w ~ N(0,1)
// Draws come from counter-based streams keyed by (seed, i), so the value
// at index i does not depend on n or on evaluation order.

namespace despeckle {

enum class NoiseModel { Speckle, AdditiveOnly };

struct ObservationSet {
    int n = 0;
    Eigen::VectorXd xs;  ///< design points i/n, i = 1..n
    Eigen::VectorXd ys;
    double sigma = 0.0;
    NoiseModel model = NoiseModel::Speckle;
    std::uint64_t seed = 0;
};

ObservationSet sample_speckle(const FunctionHandle& f, int n, double sigma, std::uint64_t seed);

ObservationSet sample_additive(const FunctionHandle& f, int n, double sigma, std::uint64_t seed);

}  // namespace despeckle
