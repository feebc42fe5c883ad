#include "despeckle/rng.hpp"

#include <cmath>

namespace despeckle::rng {

namespace {

// Acklam's rational approximation to the normal quantile.
constexpr double kA[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                          -2.759285104469687e+02, 1.383577518672690e+02,
                          -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kB[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                          -1.556989798598866e+02, 6.680131188771972e+01,
                          -1.328068155288572e+01};
constexpr double kC[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                          -2.400758277161838e+00, -2.549732539343734e+00,
                          4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kD[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                          2.445134137142996e+00, 3.754408661907416e+00};

double icdf_approx(double p) {
    constexpr double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
               ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
           (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

}  // namespace

double normal_icdf(double p) {
    double x = icdf_approx(p);
    // Halley refinement against the exact CDF.
    static const double sqrt2pi = std::sqrt(2.0 * M_PI);
    const double e = 0.5 * std::erfc(-x * M_SQRT1_2) - p;
    const double u = e * sqrt2pi * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

double standard_normal(std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
    SplitMix64 gen(derive(seed, index));
    double u = 0.0;
    for (std::uint64_t d = 0; d <= draw; ++d) u = gen.next_unit();
    return normal_icdf(u);
}

}  // namespace despeckle::rng
