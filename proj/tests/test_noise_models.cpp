#include <doctest.h>

#include <cmath>

#include "despeckle/noise_models.hpp"
#include "despeckle/rng.hpp"

using namespace despeckle;

namespace {

FunctionHandle constant(double c) {
    FunctionHandle f;
    f.eval = [c](double) { return c; };
    f.spec = HolderSpec{1.0, 1.0, 0.5};
    f.label = "const";
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("noise_models");

TEST_CASE("normal inverse CDF") {
    CHECK(rng::normal_icdf(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    // round trip through the exact CDF at several quantiles
    for (double x : {-3.0, -1.3, -0.2, 0.4, 1.0, 2.5, 4.0}) {
        const double p = 0.5 * std::erfc(-x * M_SQRT1_2);
        CHECK(rng::normal_icdf(p) == doctest::Approx(x).epsilon(1e-12));
    }
    // tails stay finite and monotone
    CHECK(rng::normal_icdf(1e-15) < -7.0);
    CHECK(rng::normal_icdf(1.0 - 1e-15) > 7.0);
}

TEST_CASE("design points are i/n and lengths agree") {
    const ObservationSet obs = sample_speckle(constant(0.7), 37, 0.3, 5);
    REQUIRE(obs.n == 37);
    REQUIRE(obs.xs.size() == 37);
    REQUIRE(obs.ys.size() == 37);
    for (int i = 1; i <= 37; ++i) CHECK(obs.xs[i - 1] == static_cast<double>(i) / 37);
    CHECK(obs.model == NoiseModel::Speckle);
}

TEST_CASE("zero signal and zero sigma give zero observations") {
    const ObservationSet obs = sample_speckle(constant(0.0), 16, 0.0, 9);
    for (int i = 0; i < 16; ++i) CHECK(obs.ys[i] == 0.0);
}

TEST_CASE("additive sampler with sigma = 0 returns f exactly") {
    FunctionHandle f;
    f.eval = [](double x) { return 0.25 + 0.5 * x; };
    f.spec = HolderSpec{1.0, 1.0, 0.25};
    f.label = "line";
    const ObservationSet obs = sample_additive(f, 64, 0.0, 123);
    for (int i = 0; i < 64; ++i) CHECK(obs.ys[i] == f(obs.xs[i]));
    CHECK(obs.model == NoiseModel::AdditiveOnly);
}

TEST_CASE("fixed seed reproduces bit-identical samples") {
    const ObservationSet a = sample_speckle(constant(0.5), 200, 1.0, 42);
    const ObservationSet b = sample_speckle(constant(0.5), 200, 1.0, 42);
    CHECK((a.ys - b.ys).lpNorm<Eigen::Infinity>() == 0.0);

    const ObservationSet c = sample_speckle(constant(0.5), 200, 1.0, 43);
    CHECK((a.ys - c.ys).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("draw at index i does not depend on n") {
    const ObservationSet big = sample_speckle(constant(0.5), 100, 1.0, 77);
    const ObservationSet small = sample_speckle(constant(0.5), 50, 1.0, 77);
    // xs differ, but the noise stream for index i is shared; with a
    // constant f the i-th observation is identical.
    for (int i = 0; i < 50; ++i) CHECK(big.ys[i] == small.ys[i]);
}

TEST_CASE("speckle second moment matches theta^2 + sigma^2") {
    const int n = 1000000;
    const double theta = 0.7, sigma = 1.0;
    const ObservationSet obs = sample_speckle(constant(theta), n, sigma, 2024);
    const double mean_sq = obs.ys.squaredNorm() / n;
    const double expect = theta * theta + sigma * sigma;
    CHECK(std::abs(mean_sq - expect) / expect < 0.01);
}

TEST_CASE("additive residual variance matches sigma^2") {
    const int n = 1000000;
    const double sigma = 0.8;
    const ObservationSet obs = sample_additive(constant(0.6), n, sigma, 4048);
    const Eigen::VectorXd resid = obs.ys.array() - 0.6;
    const double var = resid.squaredNorm() / n;
    CHECK(std::abs(var - sigma * sigma) / (sigma * sigma) < 0.01);
}

TEST_CASE("rescaling by the speckle std matches the unit-speckle model") {
    // y = f sigma_xi xi + sigma tau, rescaled by sigma_xi, has the same
    // first/second moments as the unit-speckle model at sigma/sigma_xi.
    const int n = 400000;
    const double theta = 0.6, sigma_xi = 1.7, sigma = 0.9;
    const std::uint64_t seed = 99;

    Eigen::VectorXd scaled(n);
    for (int i = 1; i <= n; ++i) {
        rng::SplitMix64 gen(rng::derive(seed, static_cast<std::uint64_t>(i)));
        const double xi = sigma_xi * rng::normal_icdf(gen.next_unit());
        const double tau = sigma * rng::normal_icdf(gen.next_unit());
        scaled[i - 1] = (theta * xi + tau) / sigma_xi;
    }
    const ObservationSet unit = sample_speckle(constant(theta), n, sigma / sigma_xi, seed + 1);

    const double m1a = scaled.mean(), m1b = unit.ys.mean();
    const double m2a = scaled.squaredNorm() / n, m2b = unit.ys.squaredNorm() / n;
    const double sd1 = 3.0 * std::sqrt(m2a / n);  // 3 se for the mean
    CHECK(std::abs(m1a - m1b) < sd1 * 2.0);
    CHECK(std::abs(m2a - m2b) / m2b < 0.02);
}

TEST_CASE("invalid arguments are rejected") {
    CHECK_THROWS_AS(sample_speckle(constant(0.5), 0, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_speckle(constant(0.5), 10, -0.1, 1), std::invalid_argument);
}

TEST_SUITE_END();
