#include "despeckle/kernel_lpe.hpp"

#include <algorithm>
#include <cmath>

namespace despeckle {

double kernel_eval(const Kernel& k, double u) {
    switch (k.kind) {
        case KernelKind::BoxHalf:
            return std::abs(u) <= k.support_radius ? 0.5 : 0.0;
    }
    return 0.0;
}

int degree_for_beta(double beta) {
    const double c = std::ceil(beta);
    return static_cast<int>(c == beta ? beta - 1.0 : c - 1.0);
}

void LpeConfig::validate() const {
    if (degree_k < 0) throw std::invalid_argument("LpeConfig: degree_k must be >= 0");
    if (n < 1) throw std::invalid_argument("LpeConfig: n must be >= 1");
    if (!(bandwidth_h > 0.0) || bandwidth_h > 1.0)
        throw std::invalid_argument("LpeConfig: bandwidth_h must be in (0, 1]");
    if (sigma < 0.0) throw std::invalid_argument("LpeConfig: sigma must be >= 0");
    // tolerance covers h = (k+1)/n whose product can round just below k+1
    if (n * bandwidth_h < degree_k + 1 - 1e-9)
        throw std::invalid_argument("LpeConfig: n*h too small for the requested degree");
}

Eigen::VectorXd feature_vector(double u, int k) {
    Eigen::VectorXd v(k + 1);
    v[0] = 1.0;
    double factorial = 1.0;
    double power = 1.0;
    for (int r = 1; r <= k; ++r) {
        power *= u;
        factorial *= r;
        v[r] = power / factorial;
    }
    return v;
}

namespace {

struct Window {
    int first = 0;  // 1-based design index of the first in-window point
    int last = -1;  // inclusive; empty when last < first
};

Window kernel_window(double x, const LpeConfig& cfg) {
    const double r = cfg.kernel.support_radius * cfg.bandwidth_h;
    // Pad by one index and let the kernel decide the boundary cases.
    int lo = std::max(1, static_cast<int>(std::floor((x - r) * cfg.n)) - 1);
    int hi = std::min(cfg.n, static_cast<int>(std::ceil((x + r) * cfg.n)) + 1);
    const double n = cfg.n;
    while (lo <= hi && kernel_eval(cfg.kernel, (lo / n - x) / cfg.bandwidth_h) == 0.0) ++lo;
    while (hi >= lo && kernel_eval(cfg.kernel, (hi / n - x) / cfg.bandwidth_h) == 0.0) --hi;
    return {lo, hi};
}

// Features and kernel values over the window, plus the normalized B.
struct LocalDesign {
    Window win;
    Eigen::MatrixXd features;  // (k+1) x m
    Eigen::VectorXd kvals;     // m
    Eigen::MatrixXd b;         // (k+1) x (k+1)
};

LocalDesign local_design(double x, const LpeConfig& cfg) {
    cfg.validate();
    LocalDesign d;
    d.win = kernel_window(x, cfg);
    const int m = std::max(0, d.win.last - d.win.first + 1);
    d.features.resize(cfg.degree_k + 1, m);
    d.kvals.resize(m);
    const double n = cfg.n;
    for (int j = 0; j < m; ++j) {
        const double u = ((d.win.first + j) / n - x) / cfg.bandwidth_h;
        d.features.col(j) = feature_vector(u, cfg.degree_k);
        d.kvals[j] = kernel_eval(cfg.kernel, u);
    }
    const double norm = 1.0 / (cfg.n * cfg.bandwidth_h);
    d.b = norm * (d.features * d.kvals.asDiagonal() * d.features.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.b, Eigen::EigenvaluesOnly);
    const double min_eig = m == 0 ? 0.0 : es.eigenvalues().minCoeff();
    if (min_eig < 1e-10) throw SingularDesign(x, min_eig);
    return d;
}

Eigen::VectorXd solve_for_origin(const Eigen::MatrixXd& b) {
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(b.rows());
    e1[0] = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() == Eigen::Success) return llt.solve(e1);
    return Eigen::LDLT<Eigen::MatrixXd>(b).solve(e1);
}

}  // namespace

Eigen::MatrixXd design_matrix(double x, const LpeConfig& cfg) {
    return local_design(x, cfg).b;
}

WeightSegment lpe_weight_segment(double x, const LpeConfig& cfg) {
    const LocalDesign d = local_design(x, cfg);
    const Eigen::VectorXd a = solve_for_origin(d.b);
    WeightSegment seg;
    seg.x = x;
    seg.first = d.win.first;
    seg.w.resize(d.kvals.size());
    const double norm = 1.0 / (cfg.n * cfg.bandwidth_h);
    for (int j = 0; j < d.kvals.size(); ++j) {
        seg.w[j] = norm * d.kvals[j] * a.dot(d.features.col(j));
    }
    return seg;
}

WeightRow lpe_weights(double x, const LpeConfig& cfg) {
    const WeightSegment seg = lpe_weight_segment(x, cfg);
    WeightRow row;
    row.x = x;
    row.weights = Eigen::VectorXd::Zero(cfg.n);
    row.weights.segment(seg.first - 1, seg.w.size()) = seg.w;
    return row;
}

double lpe_apply(const Eigen::VectorXd& responses, double x, const LpeConfig& cfg) {
    if (responses.size() != cfg.n)
        throw std::invalid_argument("lpe_apply: responses length does not match cfg.n");
    const WeightSegment seg = lpe_weight_segment(x, cfg);
    return seg.w.dot(responses.segment(seg.first - 1, seg.w.size()));
}

double lpe_apply(const Eigen::VectorXd& responses, const WeightRow& row) {
    if (responses.size() != row.weights.size())
        throw std::invalid_argument("lpe_apply: responses length does not match weights");
    return row.weights.dot(responses);
}

}  // namespace despeckle
