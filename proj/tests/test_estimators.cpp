#include <doctest.h>

#include <cmath>

#include "despeckle/estimators.hpp"
#include "despeckle/rng.hpp"

using namespace despeckle;

namespace {

// Reference values: direct evaluation of the bandwidth formulas.
constexpr double kPow1024 = 0.099212565748012467;    // (1/1024)^(1/3)
constexpr double kPow16Over1024 = 0.25;              // (16/1024)^(1/3)
constexpr double kPow4Over1024 = 0.15749013123685915;  // (4/1024)^(1/3)
constexpr double kSup2981 = 0.13896633120155947;     // (ln 2981/2981)^(1/3)
constexpr double kSup1024Beta2 = 0.36821807300508335;  // (ln 1024/1024)^(1/5)

FunctionHandle constant(double c, double h_floor = 0.1) {
    FunctionHandle f;
    f.eval = [c](double) { return c; };
    f.spec = HolderSpec{1.0, 1.0, h_floor};
    f.label = "const";
    return f;
}

ObservationSet manual_obs(const Eigen::VectorXd& ys, double sigma, NoiseModel model) {
    ObservationSet obs;
    obs.n = static_cast<int>(ys.size());
    obs.sigma = sigma;
    obs.model = model;
    obs.seed = 0;
    obs.xs.resize(obs.n);
    for (int i = 1; i <= obs.n; ++i) obs.xs[i - 1] = static_cast<double>(i) / obs.n;
    obs.ys = ys;
    return obs;
}

}  // namespace

TEST_SUITE_BEGIN("estimators");

TEST_CASE("uniform grid is the midpoint grid") {
    const Eigen::VectorXd g = uniform_grid(4);
    CHECK(g[0] == 0.125);
    CHECK(g[1] == 0.375);
    CHECK(g[2] == 0.625);
    CHECK(g[3] == 0.875);
}

TEST_CASE("despeckle_gsq recovers a constant square") {
    // ys_i^2 = c + sigma^2 for every i gives g-hat = c at any x.
    const double c = 0.49, sigma = 0.6;
    const Eigen::VectorXd ys = Eigen::VectorXd::Constant(128, std::sqrt(c + sigma * sigma));
    const ObservationSet obs = manual_obs(ys, sigma, NoiseModel::Speckle);
    LpeConfig cfg;
    cfg.degree_k = 1;
    cfg.bandwidth_h = 0.2;
    cfg.n = 128;
    cfg.sigma = sigma;
    for (double x : {0.1, 0.5, 0.93})
        CHECK(despeckle_gsq(obs, x, cfg) == doctest::Approx(c).epsilon(1e-11));
}

TEST_CASE("despeckle_gsq with sigma = 0 equals the squared-response LPE") {
    rng::SplitMix64 gen(314);
    Eigen::VectorXd ys(96);
    for (int i = 0; i < 96; ++i) ys[i] = 2.0 * gen.next_unit() - 1.0;
    const ObservationSet obs = manual_obs(ys, 0.0, NoiseModel::Speckle);
    LpeConfig cfg;
    cfg.degree_k = 1;
    cfg.bandwidth_h = 0.25;
    cfg.n = 96;
    cfg.sigma = 0.0;
    const Eigen::VectorXd squared = ys.array().square();
    for (double x : {0.2, 0.55, 0.81})
        CHECK(despeckle_gsq(obs, x, cfg) == lpe_apply(squared, x, cfg));
}

TEST_CASE("despeckle_gsq is unbiased for f^2 (Monte Carlo)") {
    const double theta = 0.6, sigma = 0.5;
    const int n = 512, trials = 10000;
    const FunctionHandle f = constant(theta);
    LpeConfig cfg;
    cfg.degree_k = 1;
    cfg.bandwidth_h = 0.25;
    cfg.n = n;
    cfg.sigma = sigma;
    const WeightRow row = lpe_weights(0.5, cfg);

    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ObservationSet obs = sample_speckle(f, n, sigma, rng::derive(11, t));
        const double g = lpe_apply(Eigen::VectorXd(obs.ys.array().square() - sigma * sigma), row);
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sumsq / trials - mean * mean) / trials);
    CHECK(std::abs(mean - theta * theta) < 3.0 * se);
}

TEST_CASE("despeckle_gsq on a deterministic additive sample") {
    // sigma = 0 and f == 1 through the additive sampler gives ys == 1,
    // so the debiased-square fit returns exactly 1 (and warns about the
    // model mismatch).
    const ObservationSet obs = sample_additive(constant(1.0), 128, 0.0, 7);
    LpeConfig cfg;
    cfg.degree_k = 0;
    cfg.bandwidth_h = 0.2;
    cfg.n = 128;
    cfg.sigma = 0.0;
    CHECK(despeckle_gsq(obs, 0.5, cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("floor bandwidth validates for every n") {
    // (k+1)/n times n can round below k+1; the validator must accept it.
    for (int n : {300, 301, 511, 997}) {
        LpeConfig cfg;
        cfg.degree_k = 1;
        cfg.bandwidth_h = bandwidth_l2_additive(n, 0.0, 2.0);  // the floor
        cfg.n = n;
        CHECK_NOTHROW(cfg.validate());
    }
}

TEST_CASE("despeckle curve applies the clamped square root") {
    const HolderSpec spec{2.0, 1.0, 0.1};
    const double sigma = 0.0;
    SUBCASE("interior value") {
        const Eigen::VectorXd ys = Eigen::VectorXd::Constant(64, 0.5);  // g-hat = 0.25
        const EstimateCurve curve =
            despeckle_estimate(manual_obs(ys, sigma, NoiseModel::Speckle), uniform_grid(8), spec, 0.3);
        for (int i = 0; i < 8; ++i) CHECK(curve.values[i] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("clamped below at the class floor") {
        // ys^2 - sigma^2 = -0.3 via sigma
        const Eigen::VectorXd ys = Eigen::VectorXd::Constant(64, 0.0);
        ObservationSet obs = manual_obs(ys, std::sqrt(0.3), NoiseModel::Speckle);
        const EstimateCurve curve = despeckle_estimate(obs, uniform_grid(8), spec, 0.3);
        for (int i = 0; i < 8; ++i) CHECK(curve.values[i] == doctest::Approx(0.1).epsilon(1e-12));
        CHECK(curve.gsq_values[0] == doctest::Approx(-0.3).epsilon(1e-11));
    }
    SUBCASE("clamped above at the class ceiling") {
        const Eigen::VectorXd ys = Eigen::VectorXd::Constant(64, std::sqrt(1.7));
        const EstimateCurve curve =
            despeckle_estimate(manual_obs(ys, sigma, NoiseModel::Speckle), uniform_grid(8), spec, 0.3);
        for (int i = 0; i < 8; ++i) CHECK(curve.values[i] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("clamp is monotone in the raw estimate") {
    const HolderSpec spec{2.0, 1.0, 0.2};
    const auto clamped = [&](double g) {
        return std::sqrt(std::min(1.0, std::max(spec.h_floor * spec.h_floor, g)));
    };
    double prev = 0.0;
    for (double g = -1.0; g <= 2.0; g += 0.01) {
        const double v = clamped(g);
        CHECK(v >= prev - 1e-15);
        prev = v;
    }
}

TEST_CASE("denoise estimate reproduces polynomials without noise") {
    FunctionHandle f;
    f.eval = [](double x) { return 0.3 + 0.4 * x; };
    f.spec = HolderSpec{2.0, 1.0, 0.1};  // k = 1
    f.label = "line";
    const ObservationSet obs = sample_additive(f, 512, 0.0, 1);
    const EstimateCurve curve = denoise_estimate(obs, uniform_grid(64), f.spec, 0.1);
    for (int i = 0; i < 64; ++i)
        CHECK(std::abs(curve.values[i] - f(curve.grid[i])) < 1e-9);
}

TEST_CASE("denoise estimate clamps constants into the class range") {
    const Eigen::VectorXd ys = Eigen::VectorXd::Constant(64, 1.8);
    const EstimateCurve curve = denoise_estimate(manual_obs(ys, 0.0, NoiseModel::AdditiveOnly),
                                                 uniform_grid(8), HolderSpec{1.0, 1.0, 0.1}, 0.3);
    for (int i = 0; i < 8; ++i) CHECK(curve.values[i] == 1.0);
}

TEST_CASE("denoise risk shrinks with n") {
    FunctionHandle f = constant(1.0, 0.25);
    f.spec.beta = 2.0;
    const auto mse_at = [&](int n) {
        const double h = bandwidth_l2_additive(n, 0.1, 2.0);
        double acc = 0.0;
        const int trials = 50;
        for (int t = 0; t < trials; ++t) {
            const ObservationSet obs = sample_additive(f, n, 0.1, rng::derive(5150, t));
            const EstimateCurve curve = denoise_estimate(obs, uniform_grid(128), f.spec, h);
            double mse = 0.0;
            for (int i = 0; i < 128; ++i) {
                const double e = curve.values[i] - 1.0;
                mse += e * e;
            }
            acc += mse / 128;
        }
        return acc / trials;
    };
    CHECK(mse_at(4096) < mse_at(256));
}

TEST_CASE("weight table curves equal per-point curves bit-for-bit") {
    FunctionHandle f = constant(0.6, 0.2);
    f.spec.beta = 2.0;
    const ObservationSet obs = sample_speckle(f, 256, 0.7, 31337);
    const Eigen::VectorXd grid = uniform_grid(48);
    const double h = 0.21;

    LpeConfig cfg;
    cfg.degree_k = 1;
    cfg.bandwidth_h = h;
    cfg.n = 256;
    cfg.sigma = 0.7;
    const WeightTable table = WeightTable::build(grid, cfg);

    const EstimateCurve direct = despeckle_estimate(obs, grid, f.spec, h);
    const EstimateCurve tabled = despeckle_estimate(obs, table, f.spec);
    CHECK((direct.values - tabled.values).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((direct.gsq_values - tabled.gsq_values).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("bandwidth selector values") {
    CHECK(bandwidth_l2(1024, 1.0, 1.0) == doctest::Approx(kPow1024).epsilon(1e-14));
    CHECK(bandwidth_l2(1024, 0.0, 1.0) == bandwidth_l2(1024, 1.0, 1.0));  // max(1, .) floor
    CHECK(bandwidth_l2(1024, 2.0, 1.0) == doctest::Approx(kPow16Over1024).epsilon(1e-14));

    CHECK(bandwidth_sup(2981, 1.0, 1.0) == doctest::Approx(kSup2981).epsilon(1e-13));
    CHECK(bandwidth_sup(1024, 0.5, 2.0) == doctest::Approx(kSup1024Beta2).epsilon(1e-13));
    CHECK(bandwidth_sup(1024, 1.2, 1.0) > bandwidth_sup(1024, 1.0, 1.0));  // monotone for sigma>1

    CHECK(bandwidth_l2_additive(1024, 1.0, 1.0) == doctest::Approx(kPow1024).epsilon(1e-14));
    CHECK(bandwidth_l2_additive(1024, 2.0, 1.0) == doctest::Approx(kPow4Over1024).epsilon(1e-14));
    CHECK(bandwidth_l2_additive(1024, 0.0, 1.0) == 1.0 / 1024);  // floor (k+1)/n

    // cap at 1/2
    CHECK(bandwidth_l2(4, 1.0, 1.0) == 0.5);
}

TEST_CASE("bandwidth scale consistency") {
    // sigma^4 = 4 exactly: (4/4096)^e == (1/1024)^e
    const double a = bandwidth_l2(4096, std::sqrt(std::sqrt(4.0)), 2.0);
    const double b = bandwidth_l2(1024, 1.0, 2.0);
    CHECK(a == doctest::Approx(b).epsilon(1e-15));
}

TEST_CASE("risk transfer: the clamped root contracts g errors") {
    rng::SplitMix64 gen(88);
    for (int rep = 0; rep < 20; ++rep) {
        const double hf = 0.1 + 0.3 * gen.next_unit();
        const double fv = hf + (1.0 - hf) * gen.next_unit();
        const double ghat = -0.5 + 2.5 * gen.next_unit();
        const double fhat = std::sqrt(std::min(1.0, std::max(hf * hf, ghat)));
        CHECK(std::abs(fhat - fv) <= std::abs(ghat - fv * fv) / hf + 1e-12);
    }
}

TEST_CASE("scalar MLE") {
    CHECK(scalar_mle(Eigen::VectorXd::Constant(10, 0.7), 0.0) ==
          doctest::Approx(0.7).epsilon(1e-15));
    CHECK(scalar_mle(Eigen::VectorXd::Constant(10, -0.7), 0.0) ==
          doctest::Approx(0.7).epsilon(1e-15));
    // mean square below sigma^2 clamps to zero
    CHECK(scalar_mle(Eigen::VectorXd::Constant(10, 0.1), 1.0) == 0.0);
    CHECK_THROWS_AS(scalar_mle(Eigen::VectorXd(), 1.0), std::invalid_argument);
}

TEST_CASE("scalar MLE delta-method variance (reduced Monte Carlo)") {
    const double theta = 0.5, sigma = 1.0;
    const int n = 4000, trials = 4000;
    const FunctionHandle f = constant(theta);
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const ObservationSet obs = sample_speckle(f, n, sigma, rng::derive(606, t));
        const double s = std::sqrt(static_cast<double>(n)) * (scalar_mle(obs.ys, sigma) - theta);
        sum += s;
        sumsq += s * s;
    }
    const double mean = sum / trials;
    const double var = (sumsq - trials * mean * mean) / (trials - 1);
    const double oracle = 2.0 * std::pow(theta * theta + sigma * sigma, 2.0) / (4 * theta * theta);
    CHECK(var == doctest::Approx(oracle).epsilon(0.10));
}

TEST_SUITE_END();
