#include "despeckle/lower_bound.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "despeckle/rng.hpp"

namespace despeckle {

double delta_l2(int n, double sigma, double beta) {
    if (n < 2) throw std::invalid_argument("delta_l2: n must be >= 2");
    const double raw =
        std::pow(std::max(1.0, std::pow(sigma, 4.0)) / n, 1.0 / (2.0 * beta + 1.0));
    return std::min(raw, 0.5);
}

int bump_count(double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("bump_count: delta must be > 0");
    return static_cast<int>(std::floor(1.0 / delta));
}

double delta_sup(int n, double sigma, double beta) {
    const double q = n / std::pow(1.0 + sigma * sigma, 2.0);
    if (!(q > std::exp(1.0)))
        throw DomainError("delta_sup: n/(1+sigma^2)^2 must exceed e");
    return std::pow(std::log(q) / q, 1.0 / (2.0 * beta + 1.0));
}

namespace {

using Word = std::uint64_t;

struct PackedCode {
    std::vector<Word> words;

    int distance(const PackedCode& other) const {
        int d = 0;
        for (std::size_t w = 0; w < words.size(); ++w) {
            d += std::popcount(words[w] ^ other.words[w]);
        }
        return d;
    }

    int weight() const {
        int s = 0;
        for (Word w : words) s += std::popcount(w);
        return s;
    }
};

}  // namespace

PackingSet gilbert_varshamov(int m, std::uint64_t seed) {
    if (m < 8) throw std::invalid_argument("gilbert_varshamov: m must be >= 8");
    const auto target_size =
        static_cast<std::size_t>(std::ceil(std::pow(2.0, m / 8.0)));
    const int threshold = static_cast<int>(std::ceil(m / 16.0));
    const int nwords = (m + 63) / 64;
    const Word tail_mask = (m % 64 == 0) ? ~Word{0} : ((Word{1} << (m % 64)) - 1);

    rng::SplitMix64 gen(seed);
    std::vector<PackedCode> accepted;
    accepted.reserve(target_size);

    constexpr long kBudget = 1000000;
    for (long attempt = 0; attempt < kBudget && accepted.size() < target_size; ++attempt) {
        PackedCode cand;
        cand.words.resize(nwords);
        for (int w = 0; w < nwords; ++w) cand.words[w] = gen.next();
        cand.words.back() &= tail_mask;
        if (cand.weight() < threshold) continue;
        bool ok = true;
        for (const PackedCode& a : accepted) {
            if (cand.distance(a) < threshold) {
                ok = false;
                break;
            }
        }
        if (ok) accepted.push_back(std::move(cand));
    }
    if (accepted.size() < target_size)
        throw SearchExhausted("gilbert_varshamov: candidate budget exhausted; retry with a new seed");

    PackingSet set;
    set.m = m;
    set.codewords.reserve(accepted.size());
    for (const PackedCode& c : accepted) {
        std::vector<std::uint8_t> bits(m);
        for (int b = 0; b < m; ++b) bits[b] = (c.words[b / 64] >> (b % 64)) & 1u;
        set.codewords.push_back(std::move(bits));
    }
    set.min_weight = m;
    set.min_distance = m;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
        set.min_weight = std::min(set.min_weight, accepted[i].weight());
        for (std::size_t j = i + 1; j < accepted.size(); ++j)
            set.min_distance = std::min(set.min_distance, accepted[i].distance(accepted[j]));
    }
    return set;
}

namespace {

void require_unit_baseline(const FunctionHandle& nu0, const ObservationSet& obs) {
    for (int i = 0; i < obs.n; ++i) {
        if (std::abs(nu0(obs.xs[i]) - 1.0) > 1e-12)
            throw std::invalid_argument("log_likelihood_ratio: closed form requires nu0 == 1");
    }
}

double gaussian_log_density(double y, double variance) {
    return -0.5 * std::log(2.0 * M_PI * variance) - y * y / (2.0 * variance);
}

}  // namespace

double log_likelihood_ratio(const FunctionHandle& nu0, const FunctionHandle& nul,
                            const ObservationSet& obs) {
    require_unit_baseline(nu0, obs);
    const double s2 = obs.sigma * obs.sigma;
    double acc = 0.0;
    for (int i = 0; i < obs.n; ++i) {
        const double v = nul(obs.xs[i]);
        const double vl = s2 + v * v;
        const double y2 = obs.ys[i] * obs.ys[i];
        acc += 0.5 * y2 * (1.0 / vl - 1.0 / (1.0 + s2)) + 0.5 * std::log(vl / (1.0 + s2));
    }
    return acc;
}

double log_likelihood_ratio_direct(const FunctionHandle& nu0, const FunctionHandle& nul,
                                   const ObservationSet& obs) {
    const double s2 = obs.sigma * obs.sigma;
    double acc = 0.0;
    for (int i = 0; i < obs.n; ++i) {
        const double v0 = nu0(obs.xs[i]);
        const double vl = nul(obs.xs[i]);
        acc += gaussian_log_density(obs.ys[i], s2 + v0 * v0) -
               gaussian_log_density(obs.ys[i], s2 + vl * vl);
    }
    return acc;
}

LrDiagnostic lr_lemma_diagnostic(int l, const PackingSet& packing, int n, double sigma,
                                 double beta, int trials, std::uint64_t seed, double bump_L,
                                 double lambda_override) {
    if (trials < 1) throw std::invalid_argument("lr_lemma_diagnostic: trials must be >= 1");
    const double delta = delta_l2(n, sigma, beta);
    const int m = bump_count(delta);
    if (packing.m != m)
        throw std::invalid_argument(
            "lr_lemma_diagnostic: packing length must equal floor(1/delta_l2(n, sigma, beta))");
    if (l < 0 || static_cast<std::size_t>(l) > packing.size())
        throw std::out_of_range("lr_lemma_diagnostic: hypothesis index out of range");

    // l = 0 stands for the all-zeros codeword (nu_l == nu_0), which the
    // packing excludes but the degenerate diagnostic permits.
    std::vector<std::uint8_t> codeword =
        l == 0 ? std::vector<std::uint8_t>(m, 0) : packing.codewords[l - 1];
    int weight = 0;
    for (auto b : codeword) weight += b;

    const BasicFunction bf = build_basic_function(beta, bump_L);
    const FunctionHandle nul = hypothesis_function(codeword, delta, bf);
    FunctionHandle nu0;
    nu0.eval = [](double) { return 1.0; };
    nu0.spec = HolderSpec{beta, bump_L, 0.5};
    nu0.label = "nu0";

    LrDiagnostic diag;
    diag.l = l;
    diag.packing_size = packing.size();
    diag.trials = trials;
    const double cl = static_cast<double>(weight) / m;
    diag.lambda_l = lambda_override >= 0.0 ? lambda_override : std::sqrt(cl / 2.0);
    const double threshold = -diag.lambda_l * std::log(static_cast<double>(packing.size()));

    long hits = 0;
    double sum_llr = 0.0;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = rng::derive(seed, static_cast<std::uint64_t>(t));
        const ObservationSet obs = sample_speckle(nul, n, sigma, trial_seed);
        const double llr = log_likelihood_ratio(nu0, nul, obs);
        sum_llr += llr;
        if (llr > threshold) ++hits;
    }
    diag.hit_rate = static_cast<double>(hits) / trials;
    diag.mean_log_lr = sum_llr / trials;
    // Wilson interval halfwidth; stays informative at hit rates of 0 or 1.
    {
        const double z = 1.96, p = diag.hit_rate, t = static_cast<double>(trials);
        diag.ci_halfwidth =
            z * std::sqrt(p * (1.0 - p) / t + z * z / (4.0 * t * t)) / (1.0 + z * z / t);
    }
    diag.phi_l2 = phi_l2_norm(bf);
    diag.phi_small_l2 = diag.phi_l2 < 0.1;
    diag.phi_small_sup = diag.phi_l2 < 1.0 / (4.0 * std::sqrt(2.0 * beta + 1.0));
    return diag;
}

double lr_oracle_max_rel_error(int instances, std::uint64_t seed) {
    if (instances < 1) throw std::invalid_argument("lr_oracle_max_rel_error: instances >= 1");
    FunctionHandle nu0;
    nu0.eval = [](double) { return 1.0; };
    nu0.spec = HolderSpec{1.0, 1.0, 0.5};
    nu0.label = "nu0";

    const double betas[] = {1.0, 1.5, 2.0, 3.0};
    BasicFunction bumps[4];
    for (int b = 0; b < 4; ++b) bumps[b] = build_basic_function(betas[b], 1.0);

    double worst = 0.0;
    for (int i = 0; i < instances; ++i) {
        rng::SplitMix64 gen(rng::derive(seed, static_cast<std::uint64_t>(i)));
        const int n = 10 + static_cast<int>(gen.next() % 91);  // 10..100
        const double sigma = 0.1 + 1.9 * gen.next_unit();
        const auto beta_idx = static_cast<int>(gen.next() % 4);
        const double beta = betas[beta_idx];
        const double delta = delta_l2(n, sigma, beta);
        const int m = bump_count(delta);
        std::vector<std::uint8_t> codeword(m, 0);
        int ones = 0;
        for (int j = 0; j < m; ++j) {
            codeword[j] = gen.next() & 1u;
            ones += codeword[j];
        }
        if (ones == 0) codeword[gen.next() % m] = 1;
        const BasicFunction& bf = bumps[beta_idx];
        const FunctionHandle nul = hypothesis_function(codeword, delta, bf);
        const ObservationSet obs = sample_speckle(nul, n, sigma, gen.next());
        const double a = log_likelihood_ratio(nu0, nul, obs);
        const double b = log_likelihood_ratio_direct(nu0, nul, obs);
        const double rel = std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0});
        worst = std::max(worst, rel);
    }
    return worst;
}

double packing_l2_separation(const PackingSet& packing, double delta, const BasicFunction& bf) {
    if (packing.size() < 2)
        throw std::invalid_argument("packing_l2_separation: need at least two codewords");
    if (delta * packing.m > 1.0 + 1e-12)
        throw std::invalid_argument("packing_l2_separation: delta*m must be <= 1");

    // Pairwise squared distances decompose over bumps: supports are
    // disjoint, so (g_a - g_b)^2 = sum over differing positions of f_j^2.
    constexpr int kGridSize = 1 << 16;
    std::vector<double> bump_sq(packing.m, 0.0);
    for (int j = 1; j <= packing.m; ++j) {
        const FunctionHandle fj = bump_function(j, delta, bf);
        const int lo = static_cast<int>(std::floor((j - 1) * delta * kGridSize)) - 1;
        const int hi = static_cast<int>(std::ceil(j * delta * kGridSize)) + 1;
        double acc = 0.0;
        for (int i = std::max(0, lo); i < std::min(kGridSize, hi); ++i) {
            const double x = (i + 0.5) / kGridSize;
            const double v = fj(x);
            acc += v * v;
        }
        bump_sq[j - 1] = acc / kGridSize;
    }

    double min_sq = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < packing.size(); ++a) {
        for (std::size_t b = a + 1; b < packing.size(); ++b) {
            double d2 = 0.0;
            for (int j = 0; j < packing.m; ++j) {
                if (packing.codewords[a][j] != packing.codewords[b][j]) d2 += bump_sq[j];
            }
            min_sq = std::min(min_sq, d2);
        }
    }
    return std::sqrt(min_sq);
}

}  // namespace despeckle
