#ifndef HAZMIX_MOMENTS_HPP
#define HAZMIX_MOMENTS_HPP

// Conditional moments E[S(t)^r | data, Y, c, beta] of the extended gamma
// process survival function with exponential base measure.
//
// Three independent routes are provided:
//   * conditional_moment_closed      closed form built from Ei,
//   * conditional_moment_oracle_log  1-D quadrature of the log integrand,
//   * conditional_moment_oracle_levy 2-D quadrature over (jump size, location).
//
// Right censoring: the continuous part uses every observed time T_i through
// K*_D(y) = beta * sum_i (T_i - y)^+, the jump part uses the exact-only
// multiplicities n*_j with the same all-observation denominator.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hazmix/errors.hpp"
#include "hazmix/quadrature.hpp"
#include "hazmix/special.hpp"
#include "hazmix/survival.hpp"

namespace hazmix {

/// f_{i,r}(x) = lambda ((xi_i + 1/beta + r t) / (i + r) - x), i + r > 0.
inline double f_ir(const SurvivalData& data, const KernelSpec& kernel, const PriorSpec& prior, std::size_t i,
                   int r, double t, double x) {
    if (i == 0 && r == 0) throw std::invalid_argument("f_ir: requires i + r > 0");
    if (i > data.size()) throw std::out_of_range("f_ir: i exceeds sample size");
    const double ir = static_cast<double>(i) + r;
    return prior.lambda * ((data.xi(i) + 1.0 / kernel.beta + r * t) / ir - x);
}

/// Evaluates the closed form for one (data, Y, c, beta) configuration. The
/// r-independent pieces are cached at construction so a grid of (t, r)
/// values costs one pass over the intervals per pair.
class MomentEvaluator {
public:
    MomentEvaluator(const SurvivalData& data, const KernelSpec& kernel, const PriorSpec& prior,
                    const ClusterState& clusters)
        : data_(&data), lambda_(prior.lambda), c_(prior.c), kappa_(1.0 / kernel.beta) {
        if (!(kernel.beta > 0.0)) throw std::invalid_argument("MomentEvaluator: beta must be positive");
        prior.validate();
        const std::size_t n = data.size();
        exp_t_.resize(n + 2);
        for (std::size_t l = 1; l <= n + 1; ++l) exp_t_[l] = std::exp(-lambda_ * data.T(l));
        // Full-interval Ei pieces for r = 0 and their suffix sums.
        suffix_w0_.assign(n + 2, 0.0);
        for (std::size_t i = n; i >= 1; --i) {
            const double a = data.T(i + 1), b = data.T(i);
            suffix_w0_[i] = suffix_w0_[i + 1] + ei0_piece(i, a, exp_t_[i + 1], b, exp_t_[i]);
        }
        jump_loc_ = clusters.locations;
        jump_mult_.reserve(clusters.k());
        jump_den_.reserve(clusters.k());
        for (std::size_t j = 0; j < clusters.k(); ++j) {
            jump_mult_.push_back(static_cast<double>(clusters.exact_sizes[j]));
            jump_den_.push_back(data.excess(jump_loc_[j]) + kappa_);
        }
    }

    /// E[S(t)^r | ...] for r >= 0; t >= 0.
    [[nodiscard]] double moment(double t, int r) const {
        if (r < 0) throw std::invalid_argument("moment: r must be nonnegative");
        if (!(t >= 0.0)) throw std::invalid_argument("moment: t must be nonnegative");
        if (r == 0 || t == 0.0) return 1.0;
        bool near_singular = false;
        double value = evaluate(t, r, near_singular);
        if (near_singular) {
            const double shift = 1e-9 * std::max(data_->max_time(), t);
            bool again = false;
            value = evaluate(t + shift, r, again);
            if (again) value = evaluate(std::max(t - shift, 0.0), r, again);
            if (again) throw NumericalError("conditional moment: Ei argument stays within 1e-9 of zero");
        }
        return value;
    }

    /// Fills out[r-1] with the r-th moment, r = 1..out.size().
    void moments(double t, std::span<double> out) const {
        for (std::size_t r = 1; r <= out.size(); ++r) out[r - 1] = moment(t, static_cast<int>(r));
    }

private:
    [[nodiscard]] double D(std::size_t i, double y) const {
        return data_->xi(i) + kappa_ - static_cast<double>(i) * y;
    }

    // e^{-la} eis(f_{i,0}(a)) - e^{-lb} eis(f_{i,0}(b)) = int_a^b i e^{-ly} / D_i(y) dy
    [[nodiscard]] double ei0_piece(std::size_t i, double a, double ea, double b, double eb) const {
        const double fi = static_cast<double>(i);
        return ea * ei_scaled(lambda_ * D(i, a) / fi) - eb * ei_scaled(lambda_ * D(i, b) / fi);
    }

    // int_a^b log(1 + r (t - y) / D_i(y)) lambda e^{-lambda y} dy without the
    // r-independent Ei part.
    [[nodiscard]] double interval_r_part(std::size_t i, int r, double t, double a, double ea, double b, double eb,
                                         bool& near_singular) const {
        const double ir = static_cast<double>(i) + r;
        const double da = D(i, a), db = D(i, b);
        const double na = da + r * (t - a), nb = db + r * (t - b);
        const double fa = lambda_ * na / ir, fb = lambda_ * nb / ir;
        if (fa < 1e-9 || fb < 1e-9) near_singular = true;
        const double logs = ea * std::log1p(r * (t - a) / da) - eb * std::log1p(r * (t - b) / db);
        const double eis = ea * ei_scaled(std::max(fa, 1e-300)) - eb * ei_scaled(std::max(fb, 1e-300));
        return logs - eis;
    }

    [[nodiscard]] double evaluate(double t, int r, bool& near_singular) const {
        const SurvivalData& data = *data_;
        const std::size_t n = data.size();
        const std::size_t p = data.count_above(t);
        const double et = std::exp(-lambda_ * t);
        double integral = 0.0;
        if (p == 0) {
            // y in (T_1, t): no observation above y.
            const double a = data.T(1), ea = exp_t_[1];
            integral += interval_r_part(0, r, t, a, ea, t, et, near_singular);
        }
        for (std::size_t i = std::max<std::size_t>(p, 1); i <= n; ++i) {
            const double a = data.T(i + 1);
            const double ea = exp_t_[i + 1];
            const bool partial = (i == p);
            const double b = partial ? t : data.T(i);
            const double eb = partial ? et : exp_t_[i];
            if (!(a < b)) continue;
            integral += interval_r_part(i, r, t, a, ea, b, eb, near_singular);
            if (partial) integral += ei0_piece(i, a, ea, b, eb);
        }
        integral += suffix_w0_[p + 1];
        double jumps = 0.0;
        for (std::size_t j = 0; j < jump_loc_.size(); ++j) {
            const double gap = t - jump_loc_[j];
            if (gap > 0.0) jumps += jump_mult_[j] * std::log1p(r * gap / jump_den_[j]);
        }
        return std::min(1.0, std::exp(-c_ * integral - jumps));
    }

    const SurvivalData* data_;
    double lambda_, c_, kappa_;
    std::vector<double> exp_t_;
    std::vector<double> suffix_w0_;
    std::vector<double> jump_loc_, jump_mult_, jump_den_;
};

inline double conditional_moment_closed(const SurvivalData& data, const KernelSpec& kernel, const PriorSpec& prior,
                                        const ClusterState& clusters, double t, int r) {
    clusters.validate(data);
    return MomentEvaluator(data, kernel, prior, clusters).moment(t, r);
}

namespace detail {

inline double jump_log_factor_closed(const SurvivalData& data, const KernelSpec& kernel,
                                     const ClusterState& clusters, double t, int r) {
    double acc = 0.0;
    for (std::size_t j = 0; j < clusters.k(); ++j) {
        const double gap = std::max(t - clusters.locations[j], 0.0);
        const double den = data.excess(clusters.locations[j]) + 1.0 / kernel.beta;
        acc += clusters.exact_sizes[j] * std::log1p(r * gap / den);
    }
    return -acc;
}

}  // namespace detail

/// int_0^inf (1 - e^{-a s}) e^{-b s} rho(s) ds with rho(s) = e^{-s}/s, by
/// quadrature. Analytically log(1 + a / (1 + b)).
inline double levy_inner_integral(double a, double b) {
    auto integrand = [a, b](double s) {
        if (s == 0.0) return a;
        return -std::expm1(-a * s) * std::exp(-(b + 1.0) * s) / s;
    };
    return quad::integrate(integrand, 0.0, std::numeric_limits<double>::infinity());
}

inline double conditional_moment_oracle_log(const SurvivalData& data, const KernelSpec& kernel,
                                            const PriorSpec& prior, const ClusterState& clusters, double t, int r) {
    if (r == 0 || t == 0.0) return 1.0;
    const double kappa = 1.0 / kernel.beta;
    const double lambda = prior.lambda;
    auto integrand = [&](double y) {
        return std::log1p(r * (t - y) / (data.excess(y) + kappa)) * lambda * std::exp(-lambda * y);
    };
    const double integral = quad::integrate_piecewise(integrand, 0.0, t, data.sorted_times());
    return std::exp(-prior.c * integral + detail::jump_log_factor_closed(data, kernel, clusters, t, r));
}

inline double conditional_moment_oracle_levy(const SurvivalData& data, const KernelSpec& kernel,
                                             const PriorSpec& prior, const ClusterState& clusters, double t, int r) {
    if (r == 0 || t == 0.0) return 1.0;
    const double beta = kernel.beta;
    const double lambda = prior.lambda;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // K_t(y) vanishes for y >= t, so the location integral stops at t.
    auto outer = [&](double y) {
        const double a = r * kernel.cumulative(t, y);
        const double b = beta * data.excess(y);
        return levy_inner_integral(a, b) * lambda * std::exp(-lambda * y);
    };
    const double continuous = quad::integrate_piecewise(outer, 0.0, t, data.sorted_times());
    double log_jumps = 0.0;
    for (std::size_t j = 0; j < clusters.k(); ++j) {
        const double y = clusters.locations[j];
        const int nj = clusters.exact_sizes[j];
        const double kd = beta * data.excess(y);
        const double kt = r * kernel.cumulative(t, y);
        // s^{n_j} rho(s) = s^{n_j - 1} e^{-s}
        auto kernel_num = [&](double s) { return std::pow(s, nj - 1) * std::exp(-s * (1.0 + kt + kd)); };
        auto kernel_den = [&](double s) { return std::pow(s, nj - 1) * std::exp(-s * (1.0 + kd)); };
        const double num = quad::integrate(kernel_num, 0.0, inf);
        const double den = quad::integrate(kernel_den, 0.0, inf);
        log_jumps += std::log(num / den);
    }
    return std::exp(-prior.c * continuous + log_jumps);
}

}  // namespace hazmix

#endif  // HAZMIX_MOMENTS_HPP
