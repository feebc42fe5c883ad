#include "despeckle/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace despeckle {

Eigen::VectorXd uniform_grid(int size) {
    if (size < 1) throw std::invalid_argument("uniform_grid: size must be >= 1");
    Eigen::VectorXd g(size);
    for (int i = 0; i < size; ++i) g[i] = (i + 0.5) / size;
    return g;
}

WeightTable WeightTable::build(const Eigen::VectorXd& grid, const LpeConfig& cfg) {
    cfg.validate();
    WeightTable table;
    table.grid = grid;
    table.config = cfg;
    table.rows.reserve(grid.size());
    for (int j = 0; j < grid.size(); ++j) table.rows.push_back(lpe_weight_segment(grid[j], cfg));
    return table;
}

Eigen::VectorXd WeightTable::apply(const Eigen::VectorXd& responses) const {
    if (responses.size() != config.n)
        throw std::invalid_argument("WeightTable::apply: responses length mismatch");
    Eigen::VectorXd out(grid.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        const WeightSegment& seg = rows[j];
        out[static_cast<int>(j)] = seg.w.dot(responses.segment(seg.first - 1, seg.w.size()));
    }
    return out;
}

namespace {

LpeConfig config_for(const ObservationSet& obs, const HolderSpec& spec, double bandwidth) {
    spec.validate();
    LpeConfig cfg;
    cfg.degree_k = degree_for_beta(spec.beta);
    cfg.bandwidth_h = bandwidth;
    cfg.n = obs.n;
    cfg.sigma = obs.sigma;
    cfg.validate();
    return cfg;
}

Eigen::VectorXd debiased_squares(const ObservationSet& obs) {
    return obs.ys.array().square() - obs.sigma * obs.sigma;
}

EstimateCurve despeckle_from_gsq(Eigen::VectorXd grid, Eigen::VectorXd gsq,
                                 const HolderSpec& spec, const LpeConfig& cfg) {
    EstimateCurve curve;
    curve.grid = std::move(grid);
    curve.gsq_values = std::move(gsq);
    curve.config = cfg;
    const double lo = spec.h_floor * spec.h_floor;
    curve.values = curve.gsq_values.array().min(1.0).max(lo).sqrt();
    return curve;
}

EstimateCurve denoise_from_raw(Eigen::VectorXd grid, Eigen::VectorXd raw, const HolderSpec& spec,
                               const LpeConfig& cfg) {
    EstimateCurve curve;
    curve.grid = std::move(grid);
    curve.gsq_values = std::move(raw);
    curve.config = cfg;
    curve.values = curve.gsq_values.array().min(1.0).max(spec.h_floor);
    return curve;
}

}  // namespace

double despeckle_gsq(const ObservationSet& obs, double x, const LpeConfig& cfg) {
    if (obs.model != NoiseModel::Speckle)
        std::cerr << "warning: despeckle_gsq applied to a non-speckle sample\n";
    if (cfg.sigma != obs.sigma)
        std::cerr << "warning: despeckle_gsq: cfg.sigma differs from obs.sigma\n";
    return lpe_apply(debiased_squares(obs), x, cfg);
}

EstimateCurve despeckle_estimate(const ObservationSet& obs, const Eigen::VectorXd& grid,
                                 const HolderSpec& spec, double bandwidth) {
    const LpeConfig cfg = config_for(obs, spec, bandwidth);
    const Eigen::VectorXd z = debiased_squares(obs);
    Eigen::VectorXd gsq(grid.size());
    for (int j = 0; j < grid.size(); ++j) gsq[j] = lpe_apply(z, grid[j], cfg);
    return despeckle_from_gsq(grid, std::move(gsq), spec, cfg);
}

EstimateCurve despeckle_estimate(const ObservationSet& obs, const WeightTable& table,
                                 const HolderSpec& spec) {
    return despeckle_from_gsq(table.grid, table.apply(debiased_squares(obs)), spec, table.config);
}

EstimateCurve denoise_estimate(const ObservationSet& obs, const Eigen::VectorXd& grid,
                               const HolderSpec& spec, double bandwidth) {
    if (obs.model != NoiseModel::AdditiveOnly)
        std::cerr << "warning: denoise_estimate applied to a non-additive sample\n";
    const LpeConfig cfg = config_for(obs, spec, bandwidth);
    Eigen::VectorXd raw(grid.size());
    for (int j = 0; j < grid.size(); ++j) raw[j] = lpe_apply(obs.ys, grid[j], cfg);
    return denoise_from_raw(grid, std::move(raw), spec, cfg);
}

EstimateCurve denoise_estimate(const ObservationSet& obs, const WeightTable& table,
                               const HolderSpec& spec) {
    return denoise_from_raw(table.grid, table.apply(obs.ys), spec, table.config);
}

namespace {

double clamp_bandwidth(double h, int n, double beta) {
    const double floor = static_cast<double>(degree_for_beta(beta) + 1) / n;
    return std::clamp(h, floor, 0.5);
}

}  // namespace

double bandwidth_l2(int n, double sigma, double beta) {
    if (n < 2) throw std::invalid_argument("bandwidth_l2: n must be >= 2");
    const double raw =
        std::pow(std::max(1.0, std::pow(sigma, 4.0)) / n, 1.0 / (2.0 * beta + 1.0));
    return clamp_bandwidth(raw, n, beta);
}

double bandwidth_sup(int n, double sigma, double beta) {
    if (n < 3) throw std::invalid_argument("bandwidth_sup: n must be >= 3");
    if (std::pow(sigma, 4.0) >= std::pow(n, 0.9))
        std::cerr << "warning: bandwidth_sup: sigma^4 >= n^0.9, outside the sup-rate regime\n";
    const double raw = std::pow(std::max(1.0, std::pow(sigma, 4.0)) * std::log(n) / n,
                                1.0 / (2.0 * beta + 1.0));
    return clamp_bandwidth(raw, n, beta);
}

double bandwidth_l2_additive(int n, double sigma, double beta) {
    if (n < 2) throw std::invalid_argument("bandwidth_l2_additive: n must be >= 2");
    const double raw = std::pow(sigma * sigma / n, 1.0 / (2.0 * beta + 1.0));
    return clamp_bandwidth(raw, n, beta);
}

double bandwidth_sup_additive(int n, double sigma, double beta) {
    if (n < 3) throw std::invalid_argument("bandwidth_sup_additive: n must be >= 3");
    const double raw = std::pow(sigma * sigma * std::log(n) / n, 1.0 / (2.0 * beta + 1.0));
    return clamp_bandwidth(raw, n, beta);
}

double scalar_mle(const Eigen::VectorXd& ys, double sigma) {
    if (ys.size() == 0) throw std::invalid_argument("scalar_mle: empty sample");
    const double mean_sq = ys.squaredNorm() / ys.size();
    return std::sqrt(std::max(0.0, mean_sq - sigma * sigma));
}

}  // namespace despeckle
