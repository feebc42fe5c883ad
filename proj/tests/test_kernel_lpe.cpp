#include <doctest.h>

#include <cmath>

#include "despeckle/kernel_lpe.hpp"
#include "despeckle/rng.hpp"

using namespace despeckle;

namespace {

LpeConfig make_cfg(int k, double h, int n) {
    LpeConfig cfg;
    cfg.degree_k = k;
    cfg.bandwidth_h = h;
    cfg.n = n;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("kernel_lpe");

TEST_CASE("box kernel values and support boundary") {
    Kernel k;
    CHECK(kernel_eval(k, 0.0) == 0.5);
    CHECK(kernel_eval(k, 1.5) == 0.0);
    CHECK(kernel_eval(k, 1.0) == 0.5);  // indicator includes |u| = 1
    CHECK(kernel_eval(k, -1.0) == 0.5);
    CHECK(kernel_eval(k, -0.999) == 0.5);
    CHECK(kernel_eval(k, 1.0000001) == 0.0);
}

TEST_CASE("kernel integrates to one (midpoint rule)") {
    Kernel k;
    const int panels = 100000;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) acc += kernel_eval(k, -1.0 + (i + 0.5) * 2.0 / panels);
    acc *= 2.0 / panels;
    CHECK(std::abs(acc - 1.0) < 1e-6);
}

TEST_CASE("degree_for_beta is the largest integer strictly below beta") {
    CHECK(degree_for_beta(0.5) == 0);
    CHECK(degree_for_beta(1.0) == 0);
    CHECK(degree_for_beta(1.5) == 1);
    CHECK(degree_for_beta(2.0) == 1);
    CHECK(degree_for_beta(2.7) == 2);
    CHECK(degree_for_beta(3.0) == 2);
}

TEST_CASE("feature vector components are u^r / r!") {
    const Eigen::VectorXd a = feature_vector(0.0, 3);
    CHECK(a.size() == 4);
    CHECK(a[0] == 1.0);
    CHECK(a[1] == 0.0);
    CHECK(a[2] == 0.0);
    CHECK(a[3] == 0.0);

    const Eigen::VectorXd b = feature_vector(2.0, 2);
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 2.0);
    CHECK(b[2] == 2.0);  // 2^2 / 2!

    const Eigen::VectorXd c = feature_vector(1.0, 1);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 1.0);
}

TEST_CASE("design matrix at the hand-worked configuration") {
    // n=5, h=0.5, x=0.5: u = {-0.6, -0.2, 0.2, 0.6, 1.0}, all in window.
    const Eigen::MatrixXd b0 = design_matrix(0.5, make_cfg(0, 0.5, 5));
    REQUIRE(b0.rows() == 1);
    CHECK(b0(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

    const Eigen::MatrixXd b1 = design_matrix(0.5, make_cfg(1, 0.5, 5));
    REQUIRE(b1.rows() == 2);
    CHECK(b1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b1(0, 1) == doctest::Approx(0.2).epsilon(1e-12));   // 0.2 * sum u
    CHECK(b1(1, 0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(b1(1, 1) == doctest::Approx(0.36).epsilon(1e-12));  // 0.2 * sum u^2
}

TEST_CASE("empty window raises SingularDesign") {
    CHECK_THROWS_AS(design_matrix(5.0, make_cfg(0, 0.1, 50)), SingularDesign);
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(make_cfg(-1, 0.2, 50).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(0, 0.0, 50).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(0, 1.5, 50).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(3, 0.05, 50).validate(), std::invalid_argument);  // n h < k+1
    CHECK_NOTHROW(make_cfg(1, 0.2, 50).validate());
}

TEST_CASE("weights at the hand-worked configuration") {
    const WeightRow w0 = lpe_weights(0.5, make_cfg(0, 0.5, 5));
    REQUIRE(w0.weights.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(w0.weights[i] == doctest::Approx(0.2).epsilon(1e-13));

    // k=1 solved by hand: B = [[1, 0.2], [0.2, 0.36]], a = (1.125, -0.625),
    // W_i = 0.2 (1.125 - 0.625 u_i).
    const WeightRow w1 = lpe_weights(0.5, make_cfg(1, 0.5, 5));
    const double expected[5] = {0.30, 0.25, 0.20, 0.15, 0.10};
    for (int i = 0; i < 5; ++i)
        CHECK(w1.weights[i] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("weight segment matches the full row") {
    const LpeConfig cfg = make_cfg(2, 0.17, 311);
    const WeightRow row = lpe_weights(0.43, cfg);
    const WeightSegment seg = lpe_weight_segment(0.43, cfg);
    Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(cfg.n);
    rebuilt.segment(seg.first - 1, seg.w.size()) = seg.w;
    CHECK((rebuilt - row.weights).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("weight identities over randomized configurations") {
    rng::SplitMix64 gen(20240517);
    const double cstar_sum = 2.5;         // measured regression baseline
    const double cstar_pointwise = 10.0;  // measured regression baseline
    for (int trial = 0; trial < 150; ++trial) {
        const int k = static_cast<int>(gen.next() % 3);
        const int n = 50 + static_cast<int>(gen.next() % 4951);
        const double hmin = 5.0 * (k + 1) / n;
        const double h = hmin + (0.5 - hmin) * gen.next_unit();
        const double x = gen.next_unit();
        const LpeConfig cfg = make_cfg(k, h, n);
        const WeightRow row = lpe_weights(x, cfg);

        CHECK(std::abs(row.sum() - 1.0) < 1e-10);

        for (int r = 1; r <= k; ++r) {
            double moment = 0.0;
            for (int i = 1; i <= n; ++i)
                moment += std::pow(static_cast<double>(i) / n - x, r) * row.weights[i - 1];
            CHECK(std::abs(moment) < 1e-8);
        }

        // reproduction of a random polynomial of degree k
        double coef[3] = {2.0 * gen.next_unit() - 1.0, 2.0 * gen.next_unit() - 1.0,
                          2.0 * gen.next_unit() - 1.0};
        const auto poly = [&](double t) {
            double v = 0.0;
            for (int r = k; r >= 0; --r) v = v * t + coef[r];
            return v;
        };
        Eigen::VectorXd responses(n);
        for (int i = 1; i <= n; ++i) responses[i - 1] = poly(static_cast<double>(i) / n);
        CHECK(std::abs(lpe_apply(responses, row) - poly(x)) < 1e-9);

        CHECK(row.weights.lpNorm<1>() <= cstar_sum);
        CHECK(n * h * row.weights.lpNorm<Eigen::Infinity>() <= cstar_pointwise);
    }
}

TEST_CASE("lpe_apply basics") {
    const LpeConfig cfg = make_cfg(1, 0.25, 64);
    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(64, 3.25);
    CHECK(lpe_apply(constant, 0.4, cfg) == doctest::Approx(3.25).epsilon(1e-12));

    Eigen::VectorXd linear(64);
    for (int i = 1; i <= 64; ++i) linear[i - 1] = static_cast<double>(i) / 64;
    CHECK(std::abs(lpe_apply(linear, 0.4, cfg) - 0.4) < 1e-9);

    CHECK(lpe_apply(Eigen::VectorXd::Zero(64), 0.4, cfg) == 0.0);

    CHECK_THROWS_AS(lpe_apply(Eigen::VectorXd::Zero(63), 0.4, cfg), std::invalid_argument);
}

TEST_CASE("weight computation is bit-reproducible") {
    const LpeConfig cfg = make_cfg(2, 0.31, 997);
    const WeightRow a = lpe_weights(0.123456, cfg);
    const WeightRow b = lpe_weights(0.123456, cfg);
    CHECK((a.weights - b.weights).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_SUITE_END();
