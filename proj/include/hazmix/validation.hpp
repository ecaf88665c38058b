#ifndef HAZMIX_VALIDATION_HPP
#define HAZMIX_VALIDATION_HPP

// Controlled study of the moment reconstruction on three random survival
// families with known laws at each t:
//
//   Beta         S(t) ~ Beta(a1 S0, a1 (1 - S0))
//   BetaMixture  S(t) ~ 1/2 Beta(a2 S0, a2 (1 - S0)) + 1/2 Beta(a3 S0, a3 (1 - S0))
//   TruncNormal  S(t) ~ N(S0, S0 (1 - S0) / a4) truncated to [0, 1]
//
// with S0(t) = e^{-t}, so every family has mean curve S0 (exactly for the
// Beta laws). Moments are computed in quad precision.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "hazmix/errors.hpp"
#include "hazmix/polyapprox.hpp"
#include "hazmix/posterior_sampler.hpp"

namespace hazmix {

using Quad = boost::multiprecision::cpp_bin_float_quad;

enum class FamilyTag { Beta, BetaMixture, TruncNormal };

inline std::string family_name(FamilyTag tag) {
    switch (tag) {
        case FamilyTag::Beta: return "beta";
        case FamilyTag::BetaMixture: return "beta_mixture";
        case FamilyTag::TruncNormal: return "trunc_normal";
    }
    return "unknown";
}

struct SyntheticFamily {
    FamilyTag tag = FamilyTag::Beta;
    double a1 = 20.0;
    double a2 = 10.0;
    double a3 = 30.0;
    double a4 = 2.0;
    double clip = 1e-6;

    [[nodiscard]] double s0(double t) const { return std::clamp(std::exp(-t), clip, 1.0 - clip); }

    /// 50 equidistant times on [0, 2.5].
    [[nodiscard]] static std::vector<double> grid(std::size_t count = 50, double upper = 2.5) {
        std::vector<double> g(count);
        for (std::size_t i = 0; i < count; ++i)
            g[i] = upper * static_cast<double>(i) / static_cast<double>(count - 1);
        return g;
    }

    /// Truncated-normal parameters (mean, sd) before truncation.
    [[nodiscard]] std::pair<double, double> normal_params(double t) const {
        const double m = s0(t);
        return {m, std::sqrt(m * (1.0 - m) / a4)};
    }

    /// True density at s in (0,1).
    [[nodiscard]] double density(double t, double s) const {
        const double m = s0(t);
        auto beta_pdf = [&](double scale) {
            const double a = scale * m, b = scale * (1.0 - m);
            return std::exp((a - 1.0) * std::log(s) + (b - 1.0) * std::log1p(-s) - std::lgamma(a) - std::lgamma(b) +
                            std::lgamma(a + b));
        };
        switch (tag) {
            case FamilyTag::Beta: return beta_pdf(a1);
            case FamilyTag::BetaMixture: return 0.5 * beta_pdf(a2) + 0.5 * beta_pdf(a3);
            case FamilyTag::TruncNormal: {
                const auto [mu, sd] = normal_params(t);
                const boost::math::normal_distribution<double> nd(mu, sd);
                const double z = boost::math::cdf(nd, 1.0) - boost::math::cdf(nd, 0.0);
                return boost::math::pdf(nd, s) / z;
            }
        }
        return 0.0;
    }

    /// Probability of [x0, x1] under the true law.
    [[nodiscard]] double cell_mass(double t, double x0, double x1) const {
        const double m = s0(t);
        auto beta_mass = [&](double scale) {
            const double a = scale * m, b = scale * (1.0 - m);
            return boost::math::ibeta(a, b, x1) - boost::math::ibeta(a, b, x0);
        };
        switch (tag) {
            case FamilyTag::Beta: return beta_mass(a1);
            case FamilyTag::BetaMixture: return 0.5 * beta_mass(a2) + 0.5 * beta_mass(a3);
            case FamilyTag::TruncNormal: {
                const auto [mu, sd] = normal_params(t);
                const boost::math::normal_distribution<double> nd(mu, sd);
                const double z = boost::math::cdf(nd, 1.0) - boost::math::cdf(nd, 0.0);
                return (boost::math::cdf(nd, x1) - boost::math::cdf(nd, x0)) / z;
            }
        }
        return 0.0;
    }

    /// Argmax of the true density on [0,1].
    [[nodiscard]] double true_mode(double t) const {
        if (tag != FamilyTag::TruncNormal) throw std::logic_error("true_mode: only available for the truncated normal");
        return s0(t);
    }
};

namespace detail {

inline std::vector<Quad> beta_raw_moments(Quad a, Quad b, int n) {
    std::vector<Quad> m(n + 1);
    m[0] = 1;
    for (int r = 1; r <= n; ++r) m[r] = m[r - 1] * (a + (r - 1)) / (a + b + (r - 1));
    return m;
}

}  // namespace detail

/// Raw moments mu_0..mu_n of the family at time t.
inline std::vector<Quad> analytic_moments(const SyntheticFamily& fam, double t, int n) {
    if (n < 0) throw std::invalid_argument("analytic_moments: order must be nonnegative");
    const Quad m = fam.s0(t);
    auto beta_of = [&](double scale) {
        const Quad a = scale * m, b = scale * (1 - m);
        if (!(a > 0 && b > 0)) throw std::invalid_argument("analytic_moments: nonpositive Beta shape");
        return detail::beta_raw_moments(a, b, n);
    };
    switch (fam.tag) {
        case FamilyTag::Beta: return beta_of(fam.a1);
        case FamilyTag::BetaMixture: {
            auto x = beta_of(fam.a2);
            const auto y = beta_of(fam.a3);
            for (int r = 0; r <= n; ++r) x[r] = (x[r] + y[r]) / 2;
            return x;
        }
        case FamilyTag::TruncNormal: {
            const Quad var = m * (1 - m) / fam.a4;
            const Quad sd = sqrt(var);
            const Quad root2 = sqrt(Quad(2));
            const Quad pi = boost::math::constants::pi<Quad>();
            auto phi = [&](Quad x) { return exp(-(x - m) * (x - m) / (2 * var)) / (sd * sqrt(2 * pi)); };
            auto Phi = [&](Quad x) { return boost::math::erfc(-(x - m) / (sd * root2)) / 2; };
            const Quad z = Phi(1) - Phi(0);
            const Quad phi0 = phi(0), phi1 = phi(1);
            std::vector<Quad> out(n + 1);
            out[0] = 1;
            for (int r = 1; r <= n; ++r) {
                const Quad prev2 = r >= 2 ? out[r - 2] : Quad(0);
                const Quad boundary = phi1 - (r == 1 ? phi0 : Quad(0));
                out[r] = m * out[r - 1] + (r - 1) * var * prev2 - var * boundary / z;
            }
            return out;
        }
    }
    return {};
}

inline double analytic_moment(const SyntheticFamily& fam, double t, int r) {
    return static_cast<double>(analytic_moments(fam, t, r)[r]);
}

/// Beta-matched reconstruction of order N from the analytic moments, held in
/// quad precision. No order fallback: a basis rejected by the conditioning
/// check propagates NumericalError.
inline ApproxDensity<Quad> reconstruct_family(const SyntheticFamily& fam, double t, int N) {
    const auto mu = analytic_moments(fam, t, N);
    const auto weight = beta_matched_weight(static_cast<double>(mu[1]), static_cast<double>(mu[2]));
    if (!weight) throw NumericalError("reconstruct_family: degenerate variance");
    return coefficients_from_moments(build_basis<Quad>(*weight, N), MomentSequence<Quad>(mu));
}

inline constexpr std::size_t kL2Cells = 1000;

/// Integrated squared error between the true density and the normalized
/// positive part of f_N, by the midpoint rule on kL2Cells cells. The
/// normalizing constant of the positive part integrates the weight exactly
/// per cell so that mass next to a singular endpoint is not lost.
template <class Real>
double l2_error(const SyntheticFamily& fam, double t, const ApproxDensity<Real>& d) {
    const auto masses = detail::cell_masses(d, kL2Cells);
    double z = 0.0;
    for (double m : masses) z += m;
    if (!(z > 0.0)) throw NumericalError("l2_error: reconstructed density has no positive part");
    const double h = 1.0 / static_cast<double>(kL2Cells);
    double ise = 0.0;
    for (std::size_t m = 0; m < kL2Cells; ++m) {
        const double s = (static_cast<double>(m) + 0.5) * h;
        const double diff = fam.density(t, s) - static_cast<double>(d.piN_unnorm(s)) / z;
        ise += diff * diff * h;
    }
    return ise;
}

inline double l2_error(const SyntheticFamily& fam, double t, int N) {
    return l2_error(fam, t, reconstruct_family(fam, t, N));
}

struct L2Point {
    int N = 0;
    double mean_error = 0.0;
    std::size_t accepted = 0;  // grid times included in the average
    std::size_t rejected = 0;  // grid times whose basis failed the conditioning check
};

/// Average over the family grid of the L2 error, for each N. Times at which
/// the order-N basis is rejected by the conditioning check are counted and
/// left out of the average.
inline std::vector<L2Point> l2_error_curve(const SyntheticFamily& fam, const std::vector<int>& orders) {
    const auto grid = SyntheticFamily::grid();
    std::vector<L2Point> out;
    for (int N : orders) {
        L2Point p;
        p.N = N;
        double acc = 0.0;
        for (double t : grid) {
            try {
                acc += l2_error(fam, t, N);
                ++p.accepted;
            } catch (const NumericalError&) {
                ++p.rejected;
            }
        }
        p.mean_error = p.accepted > 0 ? acc / static_cast<double>(p.accepted) : std::nan("");
        out.push_back(p);
    }
    return out;
}

inline std::vector<int> default_l2_orders() { return {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}; }

struct IntervalComparison {
    double t = 0.0;
    double mean = 0.0;
    double true_lo = 0.0, true_hi = 0.0;
    double approx_lo = 0.0, approx_hi = 0.0;
};

/// True and reconstructed 95% highest-density intervals on the family grid,
/// both computed on the same 4096-cell partition.
inline std::vector<IntervalComparison> interval_comparison(const SyntheticFamily& fam, int N, double level = 0.95) {
    const std::size_t cells = detail::kDensityCells;
    const auto edges = detail::uniform_edges(cells);
    std::vector<IntervalComparison> out;
    for (double t : SyntheticFamily::grid()) {
        std::vector<double> truth(cells);
        for (std::size_t m = 0; m < cells; ++m) truth[m] = std::max(fam.cell_mass(t, edges[m], edges[m + 1]), 0.0);
        const HpdInterval th = hpd_from_cells(edges, truth, level);
        const auto d = reconstruct_family(fam, t, N);
        const HpdInterval ah = hpd_interval(d, level);
        out.push_back({t, fam.s0(t), th.lo, th.hi, ah.lo, ah.hi});
    }
    return out;
}

}  // namespace hazmix

#endif  // HAZMIX_VALIDATION_HPP
