#include "despeckle/risk_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <thread>

#include "despeckle/rng.hpp"

namespace despeckle {

double SigmaRule::sigma_at(int n) const {
    switch (kind) {
        case Kind::Fixed:
            return value;
        case Kind::Power:
            return std::pow(static_cast<double>(n), value);
    }
    return value;
}

std::string SigmaRule::describe() const {
    switch (kind) {
        case Kind::Fixed:
            return "fixed(" + std::to_string(value) + ")";
        case Kind::Power:
            return "power(" + std::to_string(value) + ")";
    }
    return {};
}

double l2_risk(const FunctionHandle& f, const EstimateCurve& curve) {
    double acc = 0.0;
    for (int i = 0; i < curve.grid.size(); ++i) {
        const double e = curve.values[i] - f(curve.grid[i]);
        acc += e * e;
    }
    return acc / curve.grid.size();
}

double sup_risk(const FunctionHandle& f, const EstimateCurve& curve) {
    double m = 0.0;
    for (int i = 0; i < curve.grid.size(); ++i) {
        m = std::max(m, std::abs(curve.values[i] - f(curve.grid[i])));
    }
    return m;
}

namespace {

double select_bandwidth(EstimatorKind estimator, Loss loss, int n, double sigma, double beta) {
    if (estimator == EstimatorKind::Despeckle)
        return loss == Loss::L2 ? bandwidth_l2(n, sigma, beta) : bandwidth_sup(n, sigma, beta);
    return loss == Loss::L2 ? bandwidth_l2_additive(n, sigma, beta)
                            : bandwidth_sup_additive(n, sigma, beta);
}

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments reduce(const std::vector<double>& values) {
    Moments m;
    double sum = 0.0;
    for (double v : values) sum += v;
    m.mean = sum / values.size();
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - m.mean) * (v - m.mean);
        m.se = std::sqrt(ss / (values.size() - 1) / values.size());
    }
    return m;
}

}  // namespace

RiskPoint mc_risk(const FunctionHandle& f, EstimatorKind estimator, int n, double sigma,
                  int trials, std::uint64_t seed, Loss loss, const McConfig& cfg) {
    if (trials < 2) throw std::invalid_argument("mc_risk: trials must be >= 2");
    f.spec.validate();
    const double beta = f.spec.beta;
    const int k = degree_for_beta(beta);
    const double floor = static_cast<double>(k + 1) / n;
    const double h = std::clamp(
        cfg.bandwidth_multiplier * select_bandwidth(estimator, loss, n, sigma, beta), floor, 0.5);

    LpeConfig lpe;
    lpe.degree_k = k;
    lpe.bandwidth_h = h;
    lpe.n = n;
    lpe.sigma = sigma;
    const WeightTable table = WeightTable::build(uniform_grid(cfg.grid_size), lpe);

    std::vector<double> losses_l2(trials), losses_sup(trials);
    std::exception_ptr failure;
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};

    const auto run_trial = [&](int t) {
        const std::uint64_t trial_seed = rng::derive(seed, static_cast<std::uint64_t>(t));
        const ObservationSet obs = estimator == EstimatorKind::Despeckle
                                       ? sample_speckle(f, n, sigma, trial_seed)
                                       : sample_additive(f, n, sigma, trial_seed);
        const EstimateCurve curve = estimator == EstimatorKind::Despeckle
                                        ? despeckle_estimate(obs, table, f.spec)
                                        : denoise_estimate(obs, table, f.spec);
        losses_l2[t] = l2_risk(f, curve);
        losses_sup[t] = sup_risk(f, curve);
    };

    int workers = cfg.workers > 0
                      ? cfg.workers
                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, trials);
    if (workers <= 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) {
                    if (failed.load()) return;
                    try {
                        run_trial(t);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    const Moments m2 = reduce(losses_l2);
    const Moments ms = reduce(losses_sup);
    RiskPoint point;
    point.n = n;
    point.sigma = sigma;
    point.trials = trials;
    point.risk_l2 = m2.mean;
    point.se_l2 = m2.se;
    point.risk_sup = ms.mean;
    point.se_sup = ms.se;
    point.bandwidth = h;
    return point;
}

double theoretical_slope(Loss loss, EstimatorKind estimator, double beta, const SigmaRule& rule) {
    const double base =
        loss == Loss::L2 ? -2.0 * beta / (2.0 * beta + 1.0) : -beta / (2.0 * beta + 1.0);
    if (rule.kind == SigmaRule::Kind::Fixed) return base;
    // sigma_n = n^a: substitute sigma^4 = n^{4a} (de-speckling) or
    // sigma^2 = n^{2a} (additive baseline) into the rate exponent.
    const double a = rule.value;
    const double shrink = estimator == EstimatorKind::Despeckle ? 1.0 - 4.0 * a : 1.0 - 2.0 * a;
    return base * std::max(0.0, shrink);
}

RateFit rate_fit(const std::vector<RiskPoint>& points, Loss loss, double beta,
                 const SigmaRule& rule, EstimatorKind estimator) {
    if (points.size() < 2) throw std::invalid_argument("rate_fit: need at least two points");
    int n_min = points.front().n, n_max = points.front().n;
    for (const auto& p : points) {
        n_min = std::min(n_min, p.n);
        n_max = std::max(n_max, p.n);
    }
    if (points.size() < 4 || static_cast<double>(n_max) / n_min < 100.0)
        std::cerr << "warning: rate_fit: fewer than 4 points or under two decades of n; "
                     "slope estimate may be rough\n";

    RateFit fit;
    fit.loss = loss;
    fit.theoretical_slope = theoretical_slope(loss, estimator, beta, rule);
    fit.points.reserve(points.size());
    for (const auto& p : points) {
        const double x =
            loss == Loss::L2 ? std::log(static_cast<double>(p.n)) : std::log(p.n / std::log(p.n));
        const double risk = loss == Loss::L2 ? p.risk_l2 : p.risk_sup;
        fit.points.emplace_back(x, std::log(risk));
    }

    const auto m = static_cast<double>(fit.points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : fit.points) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / m;
    for (const auto& [x, y] : fit.points) {
        const double r = y - (fit.intercept + fit.slope * x);
        ss_res += r * r;
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

FunctionHandle make_rate_test_function(double beta, double L, double h_floor,
                                       const RateTestFunctionParams& params) {
    HolderSpec spec{beta, L, h_floor};
    spec.validate();
    if (params.widths.size() != params.centers.size() ||
        params.widths.size() != params.coefs.size() || params.widths.empty())
        throw std::invalid_argument("make_rate_test_function: mixture arrays must match");
    if (!(params.margin >= 0.0) || params.margin + h_floor >= 1.0)
        throw std::invalid_argument("make_rate_test_function: margin out of range");

    const BasicFunction bf = build_basic_function(beta, L);
    const auto mixture = [bf, params](double x) {
        double s = 0.0;
        for (std::size_t i = 0; i < params.widths.size(); ++i)
            s += params.coefs[i] * bf((x - params.centers[i]) / params.widths[i]);
        return s;
    };
    double peak = 0.0;
    constexpr int kProbe = 8192;
    for (int i = 0; i <= kProbe; ++i) peak = std::max(peak, mixture(static_cast<double>(i) / kProbe));
    if (!(peak > 0.0)) throw std::invalid_argument("make_rate_test_function: mixture vanishes on [0,1]");
    const double amp = (1.0 - h_floor - params.margin) / peak;

    FunctionHandle f;
    f.eval = [mixture, h_floor, amp](double x) { return h_floor + amp * mixture(x); };
    f.spec = spec;
    f.label = "rate-test-mixture";
    return f;
}

FunctionHandle make_constant_function(double beta, double L, double h_floor) {
    HolderSpec spec{beta, L, h_floor};
    spec.validate();
    const double c = 0.5 * (1.0 + h_floor);
    FunctionHandle f;
    f.eval = [c](double) { return c; };
    f.spec = spec;
    f.label = "constant-control";
    return f;
}

RegimeReport regime_sweep(double beta, double L, double h_floor, const std::vector<int>& ns,
                          const SigmaRule& rule, int trials, std::uint64_t seed, Loss loss,
                          const McConfig& cfg, const RateTestFunctionParams& params) {
    if (ns.empty()) throw std::invalid_argument("regime_sweep: ns must be nonempty");
    for (std::size_t i = 1; i < ns.size(); ++i) {
        if (ns[i] <= ns[i - 1]) throw std::invalid_argument("regime_sweep: ns must be increasing");
    }
    const FunctionHandle f = make_rate_test_function(beta, L, h_floor, params);

    RegimeReport report;
    report.beta = beta;
    report.L = L;
    report.h_floor = h_floor;
    report.rule = rule;
    report.loss = loss;
    report.trials = trials;
    report.seed = seed;
    report.test_function = f.label;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double sigma = rule.sigma_at(ns[i]);
        report.despeckle_points.push_back(mc_risk(f, EstimatorKind::Despeckle, ns[i], sigma,
                                                  trials, rng::derive(seed, 2 * i), loss, cfg));
        report.denoise_points.push_back(mc_risk(f, EstimatorKind::Denoise, ns[i], sigma, trials,
                                                rng::derive(seed, 2 * i + 1), loss, cfg));
    }
    report.despeckle_fit =
        rate_fit(report.despeckle_points, loss, beta, rule, EstimatorKind::Despeckle);
    report.denoise_fit = rate_fit(report.denoise_points, loss, beta, rule, EstimatorKind::Denoise);
    return report;
}

MleCheck mle_delta_method_check(double theta0, double sigma, int n, int trials,
                                std::uint64_t seed, int workers) {
    if (!(theta0 > 0.0)) throw std::invalid_argument("mle check: theta0 must be > 0");
    if (n < 1 || trials < 2) throw std::invalid_argument("mle check: n >= 1, trials >= 2");
    FunctionHandle constant;
    constant.eval = [theta0](double) { return theta0; };
    constant.spec = HolderSpec{1.0, 1.0, 0.5};
    constant.label = "theta0";

    std::vector<double> scaled(trials);
    std::atomic<int> next{0};
    const auto run_trial = [&](int t) {
        const ObservationSet obs =
            sample_speckle(constant, n, sigma, rng::derive(seed, static_cast<std::uint64_t>(t)));
        scaled[t] = std::sqrt(static_cast<double>(n)) * (scalar_mle(obs.ys, sigma) - theta0);
    };
    int nworkers =
        workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nworkers = std::min(nworkers, trials);
    if (nworkers <= 1) {
        for (int t = 0; t < trials; ++t) run_trial(t);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nworkers; ++w) {
            pool.emplace_back([&] {
                for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1)) run_trial(t);
            });
        }
        for (auto& th : pool) th.join();
    }

    MleCheck check;
    check.theta0 = theta0;
    check.sigma = sigma;
    check.n = n;
    check.trials = trials;
    const Moments m = reduce(scaled);
    double ss = 0.0;
    for (double v : scaled) ss += (v - m.mean) * (v - m.mean);
    check.sample_variance = ss / (trials - 1);
    check.mean_estimate = theta0 + m.mean / std::sqrt(static_cast<double>(n));
    const double v = theta0 * theta0 + sigma * sigma;
    check.oracle_variance = 2.0 * v * v / (4.0 * theta0 * theta0);
    return check;
}

}  // namespace despeckle
