#include "despeckle/noise_models.hpp"

#include <stdexcept>

#include "despeckle/rng.hpp"

namespace despeckle {

namespace {

ObservationSet make_base(const FunctionHandle& f, int n, double sigma, std::uint64_t seed,
                         NoiseModel model) {
    if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
    if (sigma < 0.0) throw std::invalid_argument("sample: sigma must be >= 0");
    (void)f;
    ObservationSet obs;
    obs.n = n;
    obs.sigma = sigma;
    obs.seed = seed;
    obs.model = model;
    obs.xs.resize(n);
    obs.ys.resize(n);
    for (int i = 1; i <= n; ++i) obs.xs[i - 1] = static_cast<double>(i) / n;
    return obs;
}

}  // namespace

ObservationSet sample_speckle(const FunctionHandle& f, int n, double sigma, std::uint64_t seed) {
    ObservationSet obs = make_base(f, n, sigma, seed, NoiseModel::Speckle);
    for (int i = 1; i <= n; ++i) {
        rng::SplitMix64 gen(rng::derive(seed, static_cast<std::uint64_t>(i)));
        const double xi = rng::normal_icdf(gen.next_unit());
        const double tau = rng::normal_icdf(gen.next_unit());
        obs.ys[i - 1] = f(obs.xs[i - 1]) * xi + sigma * tau;
    }
    return obs;
}

ObservationSet sample_additive(const FunctionHandle& f, int n, double sigma, std::uint64_t seed) {
    ObservationSet obs = make_base(f, n, sigma, seed, NoiseModel::AdditiveOnly);
    for (int i = 1; i <= n; ++i) {
        rng::SplitMix64 gen(rng::derive(seed, static_cast<std::uint64_t>(i)));
        const double w = rng::normal_icdf(gen.next_unit());
        obs.ys[i - 1] = f(obs.xs[i - 1]) + sigma * w;
    }
    return obs;
}

}  // namespace despeckle
