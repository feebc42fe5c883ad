#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

// Smooth test functions for the Holder class with range pinned to
// [h_floor, 1]: the compactly supported bump phi0(x) = exp(4/(4x^2-1)),
// its exact derivatives, bump and hypothesis functions, and a numeric
// membership check.

namespace despeckle {

/// Class parameters of Sigma_h(beta, L).
struct HolderSpec {
    double beta = 1.0;
    double L = 1.0;
    double h_floor = 0.5;

    void validate() const;
};

/// An evaluatable function on [0,1] with its claimed class parameters.
struct FunctionHandle {
    std::function<double(double)> eval;
    HolderSpec spec;
    std::string label;

    double operator()(double x) const { return eval(x); }
};

/// phi0(x) = exp(4/(4x^2-1)) on (-1/2, 1/2), zero elsewhere.
double phi0(double x);

/// m-th derivative of phi0, exact: phi0^(m) = P_m(x)/(1-4x^2)^(2m) * phi0
/// with P_m an integer-coefficient polynomial built by the recurrence
/// P_{m+1} = P_m' D^2 - 16 m x P_m D - 32 x P_m, D = 4x^2 - 1.
double phi0_derivative(int m, double x);

/// The scaled bump phi = (L/2) phi0 / max|phi0^(k+1)|, a basic function
/// for Sigma(beta, L/2): smooth, positive on (-1/2,1/2), zero outside,
/// with max|phi^(k+1)| = L/2.
struct BasicFunction {
    double beta = 1.0;
    double L = 1.0;
    int k = 0;
    double phibar = 1.0;        ///< max_x |phi0^(k+1)(x)|
    double extra_shrink = 1.0;  ///< optional additional scale-down

    double scale() const { return 0.5 * L / phibar * extra_shrink; }
    double operator()(double u) const { return scale() * phi0(u); }
    double derivative(int m, double u) const { return scale() * phi0_derivative(m, u); }
    double peak() const;  ///< phi* = phi(0), the maximum
};

/// Builds phi for (beta, L). The maximum of |phi0^(k+1)| is located on a
/// 1e5-point grid over (-1/2,1/2) and sharpened by golden-section search
/// to 1e-10 in x. `extra_shrink` < 1 shrinks phi further; shrinking
/// preserves every basic-function property.
BasicFunction build_basic_function(double beta, double L, double extra_shrink = 1.0);

/// f_j(x) = delta^beta phi((x - b_j)/delta) with b_j = (2j-1) delta/2.
/// Bumps for distinct j have disjoint supports. 1 <= j <= floor(1/delta).
FunctionHandle bump_function(int j, double delta, const BasicFunction& bf);

/// g(x) = 1 - sum_j codeword_j f_j(x). Codeword length must equal
/// floor(1/delta). When h_floor > 0 and delta^beta phi* > 1 - h_floor the
/// range claim cannot hold yet (it needs larger n) and a warning is
/// printed to stderr.
FunctionHandle hypothesis_function(const std::vector<std::uint8_t>& codeword, double delta,
                                   const BasicFunction& bf, double h_floor = 0.0);

/// Sup-norm family: nu_0 = 1 followed by nu_j = 1 - delta^beta
/// phi((x-b_j)/delta), j = 1..floor(1/delta). Pairwise sup-distance is
/// phi* delta^beta.
std::vector<FunctionHandle> sup_norm_hypotheses(double delta, const BasicFunction& bf,
                                                double h_floor);

/// Numeric membership report for f against f.spec.
struct HolderReport {
    double max_ratio = 0.0;  ///< max |f^(k)(x)-f^(k)(y)| / |x-y|^(beta-k)
    bool range_ok = false;   ///< h_floor <= f <= 1 on the grid
    bool holder_ok = false;  ///< max_ratio <= L * (1 + tolerance)
    double tolerance = 0.05;
};

/// Estimates f^(k) by iterated central differences on a uniform grid of
/// `grid_size` cells (step = grid spacing) and checks the Holder ratio
/// over all grid pairs. grid_size >= 100.
HolderReport check_holder_membership(const FunctionHandle& f, int grid_size = 4096);

/// Midpoint-rule integral of phi^r over its support, 2^16 panels.
double phi_moment(const BasicFunction& bf, int r);

/// ||phi||_2 = sqrt(integral of phi^2).
double phi_l2_norm(const BasicFunction& bf);

}  // namespace despeckle
