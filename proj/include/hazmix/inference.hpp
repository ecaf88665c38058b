#ifndef HAZMIX_INFERENCE_HPP
#define HAZMIX_INFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "hazmix/gibbs.hpp"
#include "hazmix/polyapprox.hpp"
#include "hazmix/posterior_sampler.hpp"
#include "hazmix/survival.hpp"

namespace hazmix {

struct MedianSurvival {
    double m_hat = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> c;  // after isotonic correction
};

/// Posterior mean of the median survival time from c_i = P(S(t_i) <= 1/2),
/// m = sum_i t_i (c_{i+1} - c_i) with c_{q+1} = 1, and the 2.5% / 97.5%
/// generalized-inverse quantiles of the step CDF (t_i, c_i).
inline MedianSurvival median_survival_time(std::span<const double> c, std::span<const double> grid) {
    if (c.size() != grid.size()) throw std::invalid_argument("median_survival_time: c and grid differ in length");
    if (c.size() < 2) throw std::invalid_argument("median_survival_time: grid too coarse (q < 2)");
    MedianSurvival out;
    out.c.resize(c.size());
    double run = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (!(c[i] >= 0.0 && c[i] <= 1.0)) throw std::invalid_argument("median_survival_time: c_i outside [0,1]");
        run = std::max(run, c[i]);
        out.c[i] = run;
    }
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double next = i + 1 < c.size() ? out.c[i + 1] : 1.0;
        out.m_hat += grid[i] * (next - out.c[i]);
    }
    auto quantile = [&](double p) {
        for (std::size_t i = 0; i < out.c.size(); ++i)
            if (out.c[i] >= p) return grid[i];
        return grid.back();
    };
    out.lo = quantile(0.025);
    out.hi = quantile(0.975);
    return out;
}

/// Riemann-sum form (M / (q - 1)) sum_i (1 - c_i).
inline double median_survival_riemann(std::span<const double> c, double M) {
    if (c.size() < 2) throw std::invalid_argument("median_survival_riemann: grid too coarse (q < 2)");
    double acc = 0.0;
    for (double v : c) acc += 1.0 - v;
    return M / static_cast<double>(c.size() - 1) * acc;
}

struct PointSummary {
    double t = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double mode = 0.0;
    double hpd_lo = 0.0;
    double hpd_hi = 0.0;
    bool hpd_conservative = false;
    double marg_lo = 0.0;
    double marg_hi = 0.0;
    double c = 0.0;  // P(S(t) <= 1/2)
    int order = 0;   // reconstruction order actually used
    bool degenerate = false;
    double ess = 0.0;
};

struct SurvivalSummary {
    std::vector<PointSummary> rows;
    MedianSurvival median;
};

/// Summaries of one time point from its moment vector mu[0..N]. A
/// near-degenerate variance collapses everything onto mu_1.
template <class Rng>
PointSummary summarize_time_point(double t, std::span<const double> mu, int N, std::size_t ell_max, Rng& rng) {
    PointSummary row;
    row.t = t;
    row.mean = mu[1];
    const auto weight = beta_matched_weight(mu[1], mu[2]);
    if (!weight) {
        row.degenerate = true;
        row.median = row.mode = row.hpd_lo = row.hpd_hi = mu[1];
        row.c = mu[1] <= 0.5 ? 1.0 : 0.0;
        row.ess = static_cast<double>(ell_max);
        return row;
    }
    std::vector<long double> values(mu.begin(), mu.begin() + N + 1);
    const MomentSequence<long double> seq(std::move(values), 1e-9);
    const auto density = reconstruct(seq, *weight, N);
    const WeightedSample ws = importance_sample(density, ell_max, rng);
    const HpdInterval hpd = hpd_interval(density, 0.95);
    row.order = density.order();
    row.median = weighted_quantile(ws, 0.5);
    row.mode = mode_estimate(density);
    row.hpd_lo = hpd.lo;
    row.hpd_hi = hpd.hi;
    row.hpd_conservative = hpd.conservative;
    row.c = weighted_cdf_at(ws, 0.5);
    row.ess = ws.ess();
    return row;
}

/// Deterministic per-time-point stream derived from (seed, index).
inline std::mt19937_64 time_point_rng(std::uint64_t seed, std::size_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), 0x9e3779b9u};
    return std::mt19937_64(seq);
}

/// Empirical 2.5% / 97.5% quantiles (linear interpolation between order
/// statistics) of the retained conditional first moments at each t.
inline std::vector<std::pair<double, double>> marginal_intervals(const std::vector<std::vector<double>>& trace) {
    std::vector<std::pair<double, double>> out;
    out.reserve(trace.size());
    auto q7 = [](const std::vector<double>& sorted, double p) {
        const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    };
    for (const auto& series : trace) {
        if (series.empty()) throw std::invalid_argument("marginal_intervals: empty trace");
        std::vector<double> s = series;
        std::sort(s.begin(), s.end());
        out.emplace_back(q7(s, 0.025), q7(s, 0.975));
    }
    return out;
}

/// Assembles the t-by-t table and the median-survival summary.
inline SurvivalSummary t_by_t_summaries(const MomentEstimates& est, std::size_t ell_max, std::uint64_t seed) {
    SurvivalSummary out;
    const auto marg = marginal_intervals(est.first_trace);
    std::vector<double> c;
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        auto rng = time_point_rng(seed, i);
        PointSummary row = summarize_time_point(est.grid[i], est.mu[i], est.N, ell_max, rng);
        row.marg_lo = marg[i].first;
        row.marg_hi = marg[i].second;
        c.push_back(row.c);
        out.rows.push_back(row);
    }
    out.median = median_survival_time(c, est.grid);
    return out;
}

struct KaplanMeier {
    std::vector<double> times;     // distinct event times
    std::vector<double> survival;  // value just after each time
    std::vector<int> at_risk;
    std::vector<int> events;

    /// Right-continuous step value at t.
    [[nodiscard]] double at(double t) const {
        double s = 1.0;
        for (std::size_t i = 0; i < times.size() && times[i] <= t; ++i) s = survival[i];
        return s;
    }

    /// Smallest event time with S <= 1/2, or NaN if never reached.
    [[nodiscard]] double median() const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (survival[i] <= 0.5) return times[i];
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// Product-limit estimator. Subjects censored at an event time count as at risk.
inline KaplanMeier kaplan_meier(std::span<const Observation> obs) {
    if (obs.empty()) throw DataError("kaplan_meier: empty dataset");
    std::vector<Observation> v(obs.begin(), obs.end());
    std::sort(v.begin(), v.end(), [](const Observation& l, const Observation& r) { return l.time < r.time; });
    KaplanMeier km;
    double s = 1.0;
    std::size_t i = 0;
    while (i < v.size()) {
        const double t = v[i].time;
        int deaths = 0, leaving = 0;
        while (i + leaving < v.size() && v[i + leaving].time == t) {
            deaths += v[i + leaving].exact ? 1 : 0;
            ++leaving;
        }
        const int risk = static_cast<int>(v.size() - i);
        if (deaths > 0) {
            s *= 1.0 - static_cast<double>(deaths) / risk;
            km.times.push_back(t);
            km.survival.push_back(s);
            km.at_risk.push_back(risk);
            km.events.push_back(deaths);
        }
        i += static_cast<std::size_t>(leaving);
    }
    return km;
}

}  // namespace hazmix

#endif  // HAZMIX_INFERENCE_HPP
