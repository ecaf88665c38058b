#ifndef HAZMIX_GIBBS_HPP
#define HAZMIX_GIBBS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "hazmix/errors.hpp"
#include "hazmix/moments.hpp"
#include "hazmix/slice.hpp"
#include "hazmix/special.hpp"
#include "hazmix/survival.hpp"

namespace hazmix {

using Rng = std::mt19937_64;

struct GibbsConfig {
    std::size_t l_max = 10000;
    std::size_t l_min = 1000;
    std::uint64_t seed = 1;
    GammaHyper c_prior{};
    GammaHyper beta_prior{};
    double lambda = 1.0;
    int N = 10;
    std::size_t q = 100;
    double M = 5.0;
    double c_init = 1.0;
    double beta_init = 1.0;
    bool keep_trace = false;
    bool debug_checks = false;

    void validate() const {
        if (!(l_min < l_max)) throw std::invalid_argument("GibbsConfig: burn-in must be shorter than the chain");
        if (N < 2) throw std::invalid_argument("GibbsConfig: N must be at least 2");
        if (q < 2) throw std::invalid_argument("GibbsConfig: q must be at least 2");
        if (!(M > 0.0)) throw std::invalid_argument("GibbsConfig: M must be positive");
        if (!(lambda > 0.0)) throw std::invalid_argument("GibbsConfig: lambda must be positive");
        if (!(c_prior.shape > 0.0 && c_prior.rate > 0.0 && beta_prior.shape > 0.0 && beta_prior.rate > 0.0))
            throw std::invalid_argument("GibbsConfig: hyperprior parameters must be positive");
    }

    /// t_i = i M / q for i = 1..q.
    [[nodiscard]] std::vector<double> grid() const {
        std::vector<double> g(q);
        for (std::size_t i = 0; i < q; ++i) g[i] = static_cast<double>(i + 1) * M / static_cast<double>(q);
        return g;
    }
};

/// Chain state. Latents are attached to exact observations only and indexed
/// in the order of SurvivalData::exact_positions().
struct GibbsState {
    std::vector<double> Y;
    std::vector<std::size_t> label;  // cluster of each latent
    std::vector<double> loc;         // distinct values
    std::vector<int> count;          // members per distinct value
    double c = 1.0;
    double beta = 1.0;

    [[nodiscard]] std::size_t k() const { return loc.size(); }

    [[nodiscard]] ClusterState clusters() const {
        ClusterState cs;
        cs.locations = loc;
        cs.sizes = count;
        cs.exact_sizes = count;
        return cs;
    }

    /// Detaches latent i from its cluster, dropping the cluster if it empties.
    void detach(std::size_t i) {
        const std::size_t j = label[i];
        if (--count[j] > 0) return;
        const std::size_t last = loc.size() - 1;
        if (j != last) {
            loc[j] = loc[last];
            count[j] = count[last];
            for (auto& l : label)
                if (l == last) l = j;
        }
        loc.pop_back();
        count.pop_back();
    }

    void attach_existing(std::size_t i, std::size_t j) {
        label[i] = j;
        ++count[j];
        Y[i] = loc[j];
    }

    void attach_new(std::size_t i, double y) {
        label[i] = loc.size();
        loc.push_back(y);
        count.push_back(1);
        Y[i] = y;
    }

    /// Rebuilds clusters from Y.
    void rebuild() {
        loc.clear();
        count.clear();
        label.assign(Y.size(), 0);
        for (std::size_t i = 0; i < Y.size(); ++i) {
            const auto it = std::find(loc.begin(), loc.end(), Y[i]);
            if (it == loc.end()) {
                label[i] = loc.size();
                loc.push_back(Y[i]);
                count.push_back(1);
            } else {
                label[i] = static_cast<std::size_t>(it - loc.begin());
                ++count[label[i]];
            }
        }
    }

    /// Throws if the bookkeeping disagrees with Y or a latent leaves its support.
    void check(const SurvivalData& data) const {
        if (Y.size() != data.exact_count()) throw std::logic_error("GibbsState: latent count mismatch");
        std::vector<int> seen(loc.size(), 0);
        for (std::size_t i = 0; i < Y.size(); ++i) {
            const double T = data.T(data.exact_positions()[i] + 1);
            if (!(Y[i] >= 0.0 && Y[i] < T)) throw std::logic_error("GibbsState: latent outside [0, T_i)");
            if (label[i] >= loc.size() || loc[label[i]] != Y[i])
                throw std::logic_error("GibbsState: label does not match latent value");
            ++seen[label[i]];
        }
        for (std::size_t j = 0; j < loc.size(); ++j)
            if (seen[j] != count[j] || count[j] < 1) throw std::logic_error("GibbsState: stale multiplicity");
        for (std::size_t j = 0; j < loc.size(); ++j)
            for (std::size_t l = j + 1; l < loc.size(); ++l)
                if (loc[j] == loc[l]) throw std::logic_error("GibbsState: duplicate cluster location");
    }
};

/// Y_i ~ U[0, T_i), c and beta from the config.
inline GibbsState initial_state(const SurvivalData& data, double c, double beta, Rng& rng) {
    GibbsState s;
    s.c = c;
    s.beta = beta;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t pos : data.exact_positions()) s.Y.push_back(unif(rng) * data.T(pos + 1));
    s.rebuild();
    return s;
}

/// int_{T_{j+1}}^{T_j} e^{-lambda y} / (xi_j + 1/beta - j y) dy for j = 1..n,
/// accumulated from the bottom: out[p] = sum_{j >= p} (entry j). Index 0 and
/// n+1 are padding.
inline std::vector<double> new_cluster_table(const SurvivalData& data, double lambda, double beta) {
    const std::size_t n = data.size();
    const double kappa = 1.0 / beta;
    std::vector<double> out(n + 2, 0.0);
    for (std::size_t j = n; j >= 1; --j) {
        const double a = data.T(j + 1), b = data.T(j);
        const double fj = static_cast<double>(j);
        const double da = data.xi(j) + kappa - fj * a;
        const double db = data.xi(j) + kappa - fj * b;
        const double w = std::exp(-lambda * a) * ei_scaled(lambda * da / fj) -
                         std::exp(-lambda * b) * ei_scaled(lambda * db / fj);
        out[j] = out[j + 1] + w / fj;
    }
    return out;
}

/// Normalized weights of the latent full conditional: p0 for a fresh draw
/// from G_0 and p[j] for the current distinct values (with latent i removed
/// from the state).
struct LatentWeights {
    double p0 = 0.0;
    std::vector<double> p;
};

inline LatentWeights latent_weights(std::size_t i, const GibbsState& detached, const SurvivalData& data,
                                    double lambda, const std::vector<double>& table) {
    const std::size_t pos = data.exact_positions()[i] + 1;
    const double Ti = data.T(pos);
    const double kappa = 1.0 / detached.beta;
    LatentWeights w;
    w.p0 = detached.c * lambda * table[pos];
    double total = w.p0;
    w.p.resize(detached.k());
    for (std::size_t j = 0; j < detached.k(); ++j) {
        if (detached.loc[j] < Ti) w.p[j] = detached.count[j] / (data.excess(detached.loc[j]) + kappa);
        total += w.p[j];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericalError("latent full conditional: total weight is zero or not finite");
    w.p0 /= total;
    for (auto& x : w.p) x /= total;
    return w;
}

/// Draw from G_0(dy) proportional to e^{-lambda y} / (excess(y) + 1/beta) on
/// [0, T) by inverting a piecewise-linear CDF table.
inline double sample_G0(double T, const SurvivalData& data, double lambda, double beta, Rng& rng) {
    constexpr std::size_t kNodes = 2048;
    const double kappa = 1.0 / beta;
    std::vector<double> y;
    y.reserve(kNodes + data.size() + 1);
    for (std::size_t l = 0; l <= kNodes; ++l) y.push_back(T * static_cast<double>(l) / kNodes);
    for (double x : data.sorted_times())
        if (x > 0.0 && x < T) y.push_back(x);
    std::sort(y.begin(), y.end());
    y.erase(std::unique(y.begin(), y.end()), y.end());

    std::vector<double> cdf(y.size(), 0.0);
    double prev = 1.0 / (data.excess(0.0) + kappa);
    for (std::size_t l = 1; l < y.size(); ++l) {
        const double g = std::exp(-lambda * y[l]) / (data.excess(y[l]) + kappa);
        cdf[l] = cdf[l - 1] + 0.5 * (g + prev) * (y[l] - y[l - 1]);
        prev = g;
    }
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t l = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, y.size() - 1);
    const double span = cdf[l] - cdf[l - 1];
    const double frac = span > 0.0 ? (u - cdf[l - 1]) / span : 0.0;
    const double draw = y[l - 1] + frac * (y[l] - y[l - 1]);
    return std::min(draw, std::nextafter(T, 0.0));
}

/// Redraws latent i from its full conditional.
inline void update_latent(std::size_t i, GibbsState& state, const SurvivalData& data, double lambda,
                          const std::vector<double>& table, Rng& rng) {
    state.detach(i);
    const LatentWeights w = latent_weights(i, state, data, lambda, table);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t j = 0; j < w.p.size(); ++j) {
        if (u < w.p[j]) {
            state.attach_existing(i, j);
            return;
        }
        u -= w.p[j];
    }
    const double T = data.T(data.exact_positions()[i] + 1);
    state.attach_new(i, sample_G0(T, data, lambda, state.beta, rng));
}

/// R(beta) = int log(1 + beta * excess(y)) P_0(dy), summed in closed form
/// over the observation intervals.
inline double integrated_log_term(const SurvivalData& data, double lambda, double beta) {
    const double kappa = 1.0 / beta;
    double acc = 0.0;
    for (std::size_t i = 1; i <= data.size(); ++i) {
        const double a = data.T(i + 1), b = data.T(i);
        const double fi = static_cast<double>(i);
        const double ea = std::exp(-lambda * a), eb = std::exp(-lambda * b);
        const double ex_a = data.xi(i) - fi * a, ex_b = data.xi(i) - fi * b;
        const double logs = ea * std::log1p(beta * ex_a) - eb * std::log1p(beta * ex_b);
        const double eis = ea * ei_scaled(lambda * (ex_a + kappa) / fi) - eb * ei_scaled(lambda * (ex_b + kappa) / fi);
        acc += logs - eis;
    }
    return acc;
}

/// Unnormalized log full conditional of c.
inline double c_log_conditional(double c, const GibbsState& state, const SurvivalData& data, double lambda,
                                const GammaHyper& prior) {
    if (!(c > 0.0)) return -std::numeric_limits<double>::infinity();
    return prior.log_density(c) + static_cast<double>(state.k()) * std::log(c) -
           c * integrated_log_term(data, lambda, state.beta);
}

/// Unnormalized log full conditional of beta.
inline double beta_log_conditional(double beta, const GibbsState& state, const SurvivalData& data, double lambda,
                                   const GammaHyper& prior) {
    if (!(beta > 0.0)) return -std::numeric_limits<double>::infinity();
    const double kappa = 1.0 / beta;
    double jumps = 0.0;
    for (std::size_t j = 0; j < state.k(); ++j) jumps += state.count[j] * std::log(data.excess(state.loc[j]) + kappa);
    return prior.log_density(beta) - state.c * integrated_log_term(data, lambda, beta) - jumps;
}

/// c | rest ~ Gamma(k + shape, R + rate); slice sampling on log c when the
/// rate is not positive.
inline double update_c(GibbsState& state, const SurvivalData& data, double lambda, const GammaHyper& prior,
                       Rng& rng) {
    const double R = integrated_log_term(data, lambda, state.beta);
    if (!std::isfinite(R)) throw NumericalError("update_c: integrated log term is not finite");
    const double shape = static_cast<double>(state.k()) + prior.shape;
    const double rate = R + prior.rate;
    if (rate > 0.0) {
        state.c = std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
    } else {
        auto target = [&](double u) { return c_log_conditional(std::exp(u), state, data, lambda, prior) + u; };
        state.c = std::exp(slice_sample(std::log(state.c), target, rng));
    }
    return state.c;
}

/// Slice-sampling fallback of update_c, exposed for cross-checking.
inline double update_c_slice(GibbsState& state, const SurvivalData& data, double lambda, const GammaHyper& prior,
                             Rng& rng) {
    auto target = [&](double u) { return c_log_conditional(std::exp(u), state, data, lambda, prior) + u; };
    state.c = std::exp(slice_sample(std::log(state.c), target, rng));
    return state.c;
}

inline double update_beta(GibbsState& state, const SurvivalData& data, double lambda, const GammaHyper& prior,
                          Rng& rng) {
    auto target = [&](double u) { return beta_log_conditional(std::exp(u), state, data, lambda, prior) + u; };
    state.beta = std::exp(slice_sample(std::log(state.beta), target, rng, 1.0, 50));
    return state.beta;
}

/// One systematic scan: every latent, then c, then beta.
inline void sweep(GibbsState& state, const SurvivalData& data, const GibbsConfig& cfg, Rng& rng) {
    const auto table = new_cluster_table(data, cfg.lambda, state.beta);
    for (std::size_t i = 0; i < state.Y.size(); ++i) update_latent(i, state, data, cfg.lambda, table, rng);
    update_c(state, data, cfg.lambda, cfg.c_prior, rng);
    update_beta(state, data, cfg.lambda, cfg.beta_prior, rng);
    if (cfg.debug_checks) state.check(data);
}

struct TraceRow {
    std::size_t l;
    double c;
    double beta;
    std::size_t k;
};

struct MomentEstimates {
    std::vector<double> grid;
    int N = 0;
    std::vector<std::vector<double>> mu;           // mu[t][r], r = 0..N
    std::vector<std::vector<double>> first_trace;  // first_trace[t][l] over retained iterations
    std::vector<TraceRow> trace;
    std::size_t retained = 0;
};

inline MomentEstimates run_chain(const SurvivalData& data, const GibbsConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    GibbsState state = initial_state(data, cfg.c_init, cfg.beta_init, rng);

    MomentEstimates est;
    est.grid = cfg.grid();
    est.N = cfg.N;
    est.retained = cfg.l_max - cfg.l_min;
    const std::size_t q = est.grid.size();
    std::vector<std::vector<double>> sums(q, std::vector<double>(cfg.N + 1, 0.0));
    est.first_trace.assign(q, {});
    for (auto& tr : est.first_trace) tr.reserve(est.retained);

    PriorSpec prior;
    prior.lambda = cfg.lambda;
    std::vector<double> buf(cfg.N);
    for (std::size_t l = 1; l <= cfg.l_max; ++l) {
        sweep(state, data, cfg, rng);
        if (cfg.keep_trace) est.trace.push_back({l, state.c, state.beta, state.k()});
        if (l <= cfg.l_min) continue;
        prior.c = state.c;
        const MomentEvaluator eval(data, KernelSpec{state.beta}, prior, state.clusters());
        for (std::size_t ti = 0; ti < q; ++ti) {
            eval.moments(est.grid[ti], buf);
            for (int r = 1; r <= cfg.N; ++r) sums[ti][r] += buf[r - 1];
            est.first_trace[ti].push_back(buf[0]);
        }
    }
    est.mu.assign(q, std::vector<double>(cfg.N + 1, 1.0));
    const double inv = 1.0 / static_cast<double>(est.retained);
    for (std::size_t ti = 0; ti < q; ++ti)
        for (int r = 1; r <= cfg.N; ++r) est.mu[ti][r] = std::clamp(sums[ti][r] * inv, 0.0, 1.0);
    return est;
}

}  // namespace hazmix

#endif  // HAZMIX_GIBBS_HPP
