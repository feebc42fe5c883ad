#pragma once

#include <cstdint>
#include <vector>

#include "despeckle/errors.hpp"
#include "despeckle/function_class.hpp"
#include "despeckle/noise_models.hpp"

// Lower-bound apparatus: the spacing delta_n, Gilbert-Varshamov packing
// sets, the closed-form likelihood ratio between hypothesis measures, and
// a Monte Carlo diagnostic for its lower-tail behaviour.

namespace despeckle {

/// delta_n = min(0.5, (max(1, sigma^4)/n)^(1/(2 beta + 1))); shares its
/// arithmetic with bandwidth_l2 (minus the window floor).
double delta_l2(int n, double sigma, double beta);

/// Number of bumps that fit: floor(1/delta).
int bump_count(double delta);

/// Sup-norm spacing (log(q)/q)^(1/(2 beta + 1)) with q = n/(1+sigma^2)^2.
/// Throws DomainError unless q > e.
double delta_sup(int n, double sigma, double beta);

/// Binary codewords with guaranteed size, weight and pairwise distance.
struct PackingSet {
    int m = 0;
    std::vector<std::vector<std::uint8_t>> codewords;
    int min_distance = 0;  ///< measured over all pairs
    int min_weight = 0;    ///< measured over all codewords

    std::size_t size() const { return codewords.size(); }
};

/// Seeded randomized greedy search for a packing with
///   size >= ceil(2^(m/8)), pairwise distance >= ceil(m/16),
///   weight >= ceil(m/16).
/// Requires m >= 8. Throws SearchExhausted past 1e6 candidates.
PackingSet gilbert_varshamov(int m, std::uint64_t seed);

/// log Lambda(nu0, nul) in closed form, valid for nu0 == 1:
///   sum_i [ y_i^2/2 (1/(s2+nul^2) - 1/(1+s2)) + log((s2+nul^2)/(1+s2))/2 ].
/// Throws std::invalid_argument if nu0 is not identically 1 on the design.
double log_likelihood_ratio(const FunctionHandle& nu0, const FunctionHandle& nul,
                            const ObservationSet& obs);

/// Same quantity as a direct difference of Gaussian log densities; kept
/// as an independent route for cross-checking the closed form.
double log_likelihood_ratio_direct(const FunctionHandle& nu0, const FunctionHandle& nul,
                                   const ObservationSet& obs);

/// Monte Carlo check of P(Lambda > M^-lambda_l) under nu_l.
struct LrDiagnostic {
    int l = 0;                ///< hypothesis index (codeword row)
    double lambda_l = 0;      ///< sqrt(C_l/2), C_l = weight/m
    std::size_t packing_size = 0;
    int trials = 0;
    double hit_rate = 0;      ///< empirical P(log Lambda > -lambda_l log M)
    double target = 1.0 / 6;  ///< p* from the proof
    double ci_halfwidth = 0;  ///< 95% Wilson interval halfwidth
    double mean_log_lr = 0;
    double phi_l2 = 0;            ///< ||phi||_2 of the bump in use
    bool phi_small_l2 = false;    ///< ||phi||_2 < 1/10
    bool phi_small_sup = false;   ///< ||phi||_2 < 1/(4 sqrt(2 beta + 1))
};

/// Samples `trials` observation sets under nu_l (built from packing row l,
/// 1-based, with delta = delta_l2(n, sigma, beta)) and reports the hit
/// rate. l = 0 selects the all-zeros codeword (nu_l == nu_0), which the
/// packing excludes but the degenerate diagnostic permits; pass
/// `lambda_override` to use a lambda other than sqrt(C_l/2) there. This
/// is a report, not an assertion: the lemma it probes is asymptotic.
LrDiagnostic lr_lemma_diagnostic(int l, const PackingSet& packing, int n, double sigma,
                                 double beta, int trials, std::uint64_t seed,
                                 double bump_L = 1.0, double lambda_override = -1.0);

/// Minimum grid-quadrature L2 distance between the hypothesis functions
/// of all codeword pairs. Requires floor(1/delta) >= m so all bumps fit.
double packing_l2_separation(const PackingSet& packing, double delta, const BasicFunction& bf);

/// Worst disagreement between log_likelihood_ratio and its direct-density
/// route over randomized instances (n <= 100, random sigma, beta and
/// codeword), measured as |a - b| / max(|a|, |b|, 1).
double lr_oracle_max_rel_error(int instances, std::uint64_t seed);

}  // namespace despeckle
