#ifndef HAZMIX_SURVIVAL_HPP
#define HAZMIX_SURVIVAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hazmix/errors.hpp"

namespace hazmix {

struct Observation {
    double time = 0.0;
    bool exact = true;  // false: right-censored
};

/// Right-censored survival sample in the layout the moment formulas use:
/// times sorted strictly decreasing (T_1 > ... > T_n, with T_{n+1} = 0) and
/// partial sums xi_l = T_1 + ... + T_l.
///
/// Ties are broken by subtracting j * 1e-9 * mean(T) from the j-th repeat.
class SurvivalData {
public:
    SurvivalData() = default;

    explicit SurvivalData(std::span<const Observation> obs) {
        if (obs.empty()) throw DataError("SurvivalData: at least one observation is required");
        double total = 0.0;
        for (const auto& o : obs) {
            if (!(o.time > 0.0) || !std::isfinite(o.time))
                throw DataError("SurvivalData: observed times must be positive and finite");
            total += o.time;
        }
        std::vector<std::size_t> order(obs.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
            if (obs[l].time != obs[r].time) return obs[l].time > obs[r].time;
            return obs[l].exact && !obs[r].exact;
        });
        const double eps = 1e-9 * total / static_cast<double>(obs.size());
        times_.reserve(obs.size());
        exact_.reserve(obs.size());
        raw_times_.reserve(obs.size());
        int repeat = 0;
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto& o = obs[order[k]];
            repeat = (k > 0 && o.time == obs[order[k - 1]].time) ? repeat + 1 : 0;
            times_.push_back(o.time - repeat * eps);
            raw_times_.push_back(o.time);
            exact_.push_back(o.exact);
        }
        xi_.assign(times_.size() + 1, 0.0);
        for (std::size_t l = 0; l < times_.size(); ++l) xi_[l + 1] = xi_[l] + times_[l];
        for (std::size_t l = 0; l < times_.size(); ++l)
            if (exact_[l]) exact_positions_.push_back(l);
    }

    explicit SurvivalData(const std::vector<Observation>& obs)
        : SurvivalData(std::span<const Observation>(obs.data(), obs.size())) {}

    [[nodiscard]] std::size_t size() const { return times_.size(); }
    [[nodiscard]] std::size_t exact_count() const { return exact_positions_.size(); }

    /// T_l for 1-based l in [0, n+1] with T_0 = +inf and T_{n+1} = 0.
    [[nodiscard]] double T(std::size_t l) const {
        if (l == 0) return std::numeric_limits<double>::infinity();
        if (l > times_.size()) return 0.0;
        return times_[l - 1];
    }
    [[nodiscard]] bool exact(std::size_t l) const { return exact_[l - 1]; }
    /// xi_l for l in [0, n].
    [[nodiscard]] double xi(std::size_t l) const { return xi_[l]; }

    [[nodiscard]] const std::vector<double>& sorted_times() const { return times_; }
    [[nodiscard]] const std::vector<double>& raw_sorted_times() const { return raw_times_; }
    [[nodiscard]] const std::vector<bool>& exact_flags() const { return exact_; }
    /// 0-based positions (into the sorted order) of exact observations.
    [[nodiscard]] const std::vector<std::size_t>& exact_positions() const { return exact_positions_; }
    [[nodiscard]] double max_time() const { return times_.front(); }

    /// Number of observed times strictly greater than y.
    [[nodiscard]] std::size_t count_above(double y) const {
        // times_ is decreasing; first index with T <= y.
        const auto it = std::partition_point(times_.begin(), times_.end(), [y](double t) { return t > y; });
        return static_cast<std::size_t>(it - times_.begin());
    }

    /// sum_l (T_l - y)^+, i.e. K*_D(y) / beta.
    [[nodiscard]] double excess(double y) const {
        const std::size_t i = count_above(y);
        return xi_[i] - static_cast<double>(i) * y;
    }

private:
    std::vector<double> times_;
    std::vector<double> raw_times_;
    std::vector<bool> exact_;
    std::vector<double> xi_;
    std::vector<std::size_t> exact_positions_;
};

/// Cumulative kernel K_t(y) = beta * (t - y)^+ of k(t; y) = 1{0 < y <= t} beta.
struct KernelSpec {
    double beta = 1.0;

    [[nodiscard]] double cumulative(double t, double y) const { return beta * std::max(t - y, 0.0); }
};

struct GammaHyper {
    double shape = 1.0;
    double rate = 1.0 / 3.0;

    [[nodiscard]] double log_density(double x) const {
        if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
        return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
    }
};

/// Gamma CRM with intensity rho(s) = e^{-s}/s, total mass c and exponential
/// base measure P_0(dy) = lambda e^{-lambda y} dy.
struct PriorSpec {
    double lambda = 1.0;
    double c = 1.0;
    GammaHyper c_prior{};
    GammaHyper beta_prior{};

    void validate() const {
        if (!(lambda > 0.0) || !(c > 0.0)) throw std::invalid_argument("PriorSpec: lambda and c must be positive");
    }
};

/// Distinct latent locations with their multiplicities. n_j counts every
/// member; n*_j counts members attached to exact observations. Latents exist
/// only for exact observations here, so the two agree, but the moment and
/// conditional formulas read n*_j.
struct ClusterState {
    std::vector<double> locations;
    std::vector<int> sizes;        // n_j
    std::vector<int> exact_sizes;  // n*_j

    [[nodiscard]] std::size_t k() const { return locations.size(); }

    /// Groups identical latent values (sorted ascending for a stable layout).
    static ClusterState from_latents(std::span<const double> latents) {
        std::vector<double> v(latents.begin(), latents.end());
        std::sort(v.begin(), v.end());
        ClusterState out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0 && v[i] == v[i - 1]) {
                ++out.sizes.back();
                ++out.exact_sizes.back();
            } else {
                out.locations.push_back(v[i]);
                out.sizes.push_back(1);
                out.exact_sizes.push_back(1);
            }
        }
        return out;
    }

    /// Checks the multiplicity bookkeeping and that every location lies in
    /// [0, max T). Per-member support is the sampler's responsibility.
    void validate(const SurvivalData& data) const {
        if (locations.size() != sizes.size() || sizes.size() != exact_sizes.size())
            throw std::invalid_argument("ClusterState: inconsistent lengths");
        long total = 0;
        for (std::size_t j = 0; j < k(); ++j) {
            if (!(locations[j] >= 0.0) || !(locations[j] < data.max_time()))
                throw std::invalid_argument("ClusterState: location outside [0, max T)");
            if (exact_sizes[j] < 1 || sizes[j] < exact_sizes[j])
                throw std::invalid_argument("ClusterState: invalid multiplicity");
            total += exact_sizes[j];
        }
        if (total != static_cast<long>(data.exact_count()))
            throw std::invalid_argument("ClusterState: exact multiplicities must sum to the exact count");
    }
};

}  // namespace hazmix

#endif  // HAZMIX_SURVIVAL_HPP
