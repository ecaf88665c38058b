#ifndef HAZMIX_SPECIAL_HPP
#define HAZMIX_SPECIAL_HPP

// Exponential integral Ei and its exponentially scaled form.
//
//   Ei(z) = -PV int_{-z}^inf e^{-t}/t dt,   z != 0.
//
// Positive arguments use the convergent power series below 40 and the
// asymptotic expansion above; negative arguments go through E1(-z) with the
// series for |z| <= 1 and a Lentz continued fraction otherwise.

#include <cmath>
#include <limits>
#include <numbers>

#include "hazmix/errors.hpp"

namespace hazmix {

namespace detail {

inline constexpr double kAsymptoticThreshold = 40.0;

// e^{-x} * sum_{k>=1} x^k / (k k!) plus the log/gamma part, for 0 < x < 40.
inline double ei_series_scaled(double x) {
    double term = 1.0;  // x^k / k!
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= x / k;
        const double add = term / k;
        sum += add;
        if (add < sum * 1e-17) break;
    }
    return std::exp(-x) * (std::numbers::egamma + std::log(x) + sum);
}

// e^{-x} Ei(x) ~ (1/x) sum_k k!/x^k, truncated at the smallest term.
inline double ei_asymptotic_scaled(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / x;
        if (next > term) break;
        term = next;
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum / x;
}

// E1(u) for u > 0.
inline double e1_positive(double u) {
    if (u <= 1.0) {
        double term = 1.0;  // (-u)^k / k!
        double sum = 0.0;
        for (int k = 1; k < 200; ++k) {
            term *= -u / k;
            const double add = term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        }
        return -std::numbers::egamma - std::log(u) - sum;
    }
    // Modified Lentz on E1(u) = e^{-u} / (u + 1 - 1^2/(u + 3 - 2^2/(u + 5 - ...)))
    constexpr double tiny = 1e-300;
    double b = u + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double delta = c * d;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-u);
}

}  // namespace detail

/// e^{-x} Ei(x) for x > 0. Finite for every positive x, so it can be used
/// where Ei itself would overflow.
inline double ei_scaled(double x) {
    if (!(x > 0.0)) throw NumericalError("ei_scaled: argument must be positive");
    if (x >= detail::kAsymptoticThreshold) return detail::ei_asymptotic_scaled(x);
    return detail::ei_series_scaled(x);
}

/// Principal-value exponential integral Ei(z), z != 0.
inline double ei(double z) {
    if (z == 0.0 || std::isnan(z)) throw NumericalError("ei: logarithmic singularity at z = 0");
    if (z < 0.0) return -detail::e1_positive(-z);
    if (z >= detail::kAsymptoticThreshold) return std::exp(z) * detail::ei_asymptotic_scaled(z);
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= z / k;
        const double add = term / k;
        sum += add;
        if (add < sum * 1e-17) break;
    }
    return std::numbers::egamma + std::log(z) + sum;
}

}  // namespace hazmix

#endif  // HAZMIX_SPECIAL_HPP
