#ifndef HAZMIX_POSTERIOR_SAMPLER_HPP
#define HAZMIX_POSTERIOR_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/tools/minima.hpp>

#include "hazmix/errors.hpp"
#include "hazmix/polyapprox.hpp"

namespace hazmix {

/// Self-normalized weighted sample on [0,1], stored sorted by value.
class WeightedSample {
public:
    WeightedSample(std::vector<double> values, std::vector<double> weights) {
        if (values.empty() || values.size() != weights.size())
            throw std::invalid_argument("WeightedSample: values and weights must be non-empty and equal length");
        double total = 0.0;
        for (double w : weights) {
            if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument("WeightedSample: invalid weight");
            total += w;
        }
        if (!(total > 0.0)) throw NumericalError("WeightedSample: all weights are zero");
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
        values_.reserve(values.size());
        weights_.reserve(values.size());
        cumulative_.reserve(values.size());
        double acc = 0.0;
        for (std::size_t idx : order) {
            values_.push_back(values[idx]);
            weights_.push_back(weights[idx] / total);
            acc += weights_.back();
            cumulative_.push_back(acc);
        }
        cumulative_.back() = 1.0;
    }

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
    [[nodiscard]] const std::vector<double>& cumulative() const { return cumulative_; }

    /// 1 / sum w^2.
    [[nodiscard]] double ess() const {
        double s = 0.0;
        for (double w : weights_) s += w * w;
        return 1.0 / s;
    }

    [[nodiscard]] double mean() const {
        double m = 0.0;
        for (std::size_t l = 0; l < values_.size(); ++l) m += weights_[l] * values_[l];
        return m;
    }

private:
    std::vector<double> values_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
};

/// Beta(a, b) proposals matching the basis weight; weight of a draw is the
/// positive part of f_N over the proposal density, i.e. max(polynomial, 0).
template <class Real, class Rng>
WeightedSample importance_sample(const ApproxDensity<Real>& d, std::size_t ell_max, Rng& rng) {
    if (ell_max < 1) throw std::invalid_argument("importance_sample: need at least one draw");
    const WeightParams& w = d.weight();
    std::gamma_distribution<double> ga(w.a, 1.0), gb(w.b, 1.0);
    std::vector<double> s(ell_max), wt(ell_max);
    for (std::size_t l = 0; l < ell_max; ++l) {
        const double x = ga(rng), y = gb(rng);
        const double sum = x + y;
        s[l] = sum > 0.0 ? x / sum : 0.5;
        wt[l] = static_cast<double>(std::max(d.polynomial(s[l]), 0.0L));
    }
    if (std::all_of(wt.begin(), wt.end(), [](double v) { return v == 0.0; }))
        throw NumericalError("importance_sample: reconstructed density is non-positive at every proposal");
    return WeightedSample(std::move(s), std::move(wt));
}

/// Right-continuous weighted empirical CDF.
inline double weighted_cdf_at(const WeightedSample& ws, double x) {
    const auto& v = ws.values();
    const auto it = std::upper_bound(v.begin(), v.end(), x);
    if (it == v.begin()) return 0.0;
    return ws.cumulative()[static_cast<std::size_t>(it - v.begin()) - 1];
}

/// Generalized inverse inf{x : F(x) >= p}.
inline double weighted_quantile(const WeightedSample& ws, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("weighted_quantile: p outside [0,1]");
    const auto& cum = ws.cumulative();
    const auto it = std::lower_bound(cum.begin(), cum.end(), p - 1e-12);
    const std::size_t idx = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    return ws.values()[idx];
}

struct HpdInterval {
    double lo = 0.0;
    double hi = 1.0;
    bool conservative = false;  // super-level set was not contiguous
    double mass = 1.0;          // captured normalized mass
};

/// Highest-density interval from per-cell masses on [edges[m], edges[m+1]].
/// Cells are ranked by average density and added until `level` of the total
/// mass is captured; the result is the hull of the selected cells.
inline HpdInterval hpd_from_cells(std::span<const double> edges, std::span<const double> masses, double level) {
    const std::size_t cells = masses.size();
    if (edges.size() != cells + 1) throw std::invalid_argument("hpd_from_cells: edges/masses size mismatch");
    if (!(level > 0.0 && level <= 1.0)) throw std::invalid_argument("hpd_from_cells: level must be in (0,1]");
    const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
    if (!(total > 0.0)) throw NumericalError("hpd_from_cells: zero total mass");
    std::vector<std::size_t> order;
    for (std::size_t m = 0; m < cells; ++m)
        if (masses[m] > 0.0) order.push_back(m);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
        return masses[l] / (edges[l + 1] - edges[l]) > masses[r] / (edges[r + 1] - edges[r]);
    });
    std::vector<char> chosen(cells, 0);
    double acc = 0.0;
    std::size_t used = 0;
    const double target = level * total * (1.0 - 1e-12);
    for (std::size_t m : order) {
        chosen[m] = 1;
        acc += masses[m];
        ++used;
        if (acc >= target) break;
    }
    std::size_t first = cells, last = 0;
    for (std::size_t m = 0; m < cells; ++m)
        if (chosen[m]) {
            first = std::min(first, m);
            last = m;
        }
    HpdInterval out;
    out.lo = edges[first];
    out.hi = edges[last + 1];
    out.conservative = (last - first + 1) != used;
    double hull = 0.0;
    for (std::size_t m = first; m <= last; ++m) hull += masses[m];
    out.mass = hull / total;
    return out;
}

namespace detail {

inline constexpr std::size_t kDensityCells = 4096;

/// Mass of max(f_N, 0) in each of the uniform cells. The weight is
/// integrated exactly through the regularized incomplete beta function and
/// the polynomial is taken at the cell midpoint, which keeps cells next to a
/// singular endpoint accurate.
template <class Real>
std::vector<double> cell_masses(const ApproxDensity<Real>& d, std::size_t cells) {
    const WeightParams& w = d.weight();
    const double beta_fn = std::exp(static_cast<double>(w.log_beta()));
    std::vector<double> masses(cells);
    double prev = 0.0;
    for (std::size_t m = 0; m < cells; ++m) {
        const double right = static_cast<double>(m + 1) / static_cast<double>(cells);
        const double cdf = m + 1 == cells ? 1.0 : boost::math::ibeta(w.a, w.b, right);
        const double weight_mass = std::max(cdf - prev, 0.0);
        prev = cdf;
        const double mid = (static_cast<double>(m) + 0.5) / static_cast<double>(cells);
        masses[m] = beta_fn * weight_mass * static_cast<double>(std::max(d.polynomial(mid), 0.0L));
    }
    return masses;
}

inline std::vector<double> uniform_edges(std::size_t cells) {
    std::vector<double> e(cells + 1);
    for (std::size_t m = 0; m <= cells; ++m) e[m] = static_cast<double>(m) / static_cast<double>(cells);
    return e;
}

}  // namespace detail

/// HPD interval of the normalized positive part of f_N on a 4096-cell grid.
template <class Real>
HpdInterval hpd_interval(const ApproxDensity<Real>& d, double level = 0.95) {
    const auto masses = detail::cell_masses(d, detail::kDensityCells);
    const auto edges = detail::uniform_edges(detail::kDensityCells);
    return hpd_from_cells(edges, masses, level);
}

/// Argmax of max(f_N, 0) on [0,1]. An endpoint where the weight diverges
/// and the polynomial is positive wins outright; a density flat to 1e-12
/// returns 0.5.
template <class Real>
double mode_estimate(const ApproxDensity<Real>& d) {
    const WeightParams& w = d.weight();
    const bool sing0 = w.a < 1.0 && d.polynomial(0.0L) > 0.0L;
    const bool sing1 = w.b < 1.0 && d.polynomial(1.0L) > 0.0L;
    if (sing0 || sing1) {
        if (sing0 && !sing1) return 0.0;
        if (sing1 && !sing0) return 1.0;
        // Both endpoints diverge: compare at a common small offset.
        const long double h = 1e-12L;
        return d.piN_unnorm(h) >= d.piN_unnorm(1.0L - h) ? 0.0 : 1.0;
    }
    auto density = [&](double s) { return static_cast<double>(d.piN_unnorm(s)); };
    constexpr std::size_t cells = detail::kDensityCells;
    std::size_t best = 0;
    double best_val = -1.0, low_val = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m <= cells; ++m) {
        const double v = density(static_cast<double>(m) / cells);
        if (v > best_val) {
            best_val = v;
            best = m;
        }
        low_val = std::min(low_val, v);
    }
    if (best_val - low_val <= 1e-12 * std::max(best_val, 1.0)) return 0.5;
    const double lo = static_cast<double>(best == 0 ? 0 : best - 1) / cells;
    const double hi = static_cast<double>(std::min(best + 1, cells)) / cells;
    const auto refined = boost::math::tools::brent_find_minima([&](double s) { return -density(s); }, lo, hi, 40);
    return -refined.second >= best_val ? refined.first : static_cast<double>(best) / cells;
}

}  // namespace hazmix

#endif  // HAZMIX_POSTERIOR_SAMPLER_HPP
