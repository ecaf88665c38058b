#ifndef HAZMIX_TESTS_RANDOM_CONFIGS_HPP
#define HAZMIX_TESTS_RANDOM_CONFIGS_HPP

#include <algorithm>
#include <random>
#include <vector>

#include "hazmix/survival.hpp"

namespace hazmix::fixtures {

/// One frozen (data, Y, c, beta, t, r) configuration for the moment routes.
struct MomentConfig {
    std::vector<Observation> obs;
    SurvivalData data;
    ClusterState clusters;
    KernelSpec kernel;
    PriorSpec prior;
    double t = 0.0;
    int r = 1;
};

/// n <= 5 observations (about a quarter censored, the largest exact), at
/// most 3 distinct latent locations, t in (0, M) with M = 2 max T, r <= 10.
inline MomentConfig random_moment_config(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    MomentConfig cfg;
    const int n = 1 + static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) cfg.obs.push_back({0.2 + 3.0 * U(rng), i == 0 || U(rng) < 0.75});
    std::sort(cfg.obs.begin(), cfg.obs.end(), [](const Observation& a, const Observation& b) {
        return a.time > b.time;
    });
    cfg.obs.front().exact = true;
    cfg.data = SurvivalData(cfg.obs);
    std::vector<double> latents;
    for (std::size_t p : cfg.data.exact_positions()) latents.push_back(U(rng) * cfg.data.T(p + 1));
    // Merge down to at most 3 distinct values by moving the largest location
    // onto the smallest, which keeps every latent below its own time.
    while (true) {
        auto distinct = latents;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() <= 3) break;
        std::replace(latents.begin(), latents.end(), distinct.back(), distinct.front());
    }
    cfg.clusters = ClusterState::from_latents(latents);
    cfg.kernel.beta = 0.2 + 3.0 * U(rng);
    cfg.prior.lambda = 0.3 + 2.0 * U(rng);
    cfg.prior.c = 0.2 + 3.0 * U(rng);
    const double M = 2.0 * cfg.data.max_time();
    cfg.t = M * (0.001 + 0.998 * U(rng));
    cfg.r = 1 + static_cast<int>(rng() % 10);
    return cfg;
}

}  // namespace hazmix::fixtures

#endif  // HAZMIX_TESTS_RANDOM_CONFIGS_HPP
