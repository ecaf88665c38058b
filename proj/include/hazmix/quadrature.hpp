#ifndef HAZMIX_QUADRATURE_HPP
#define HAZMIX_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hazmix/errors.hpp"

namespace hazmix::quad {

inline constexpr unsigned kMaxDepth = 20;
inline constexpr double kTolerance = 1e-12;

/// Adaptive 61-point Gauss–Kronrod on [a, b]. b may be +infinity.
template <class F>
double integrate(F&& f, double a, double b, double tol = kTolerance) {
    if (a == b) return 0.0;
    double err = 0.0;
    double l1 = 0.0;
    // Repeated bisection of a piece this narrow relative to its position
    // soon rounds the nodes, so such pieces get a single rule.
    const bool narrow = std::isfinite(b) && (b - a) <= 1e-6 * std::max(std::fabs(a), std::fabs(b));
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        f, a, b, narrow ? 0u : kMaxDepth, tol, &err, &l1);
    if (!std::isfinite(value)) throw NumericalError("quadrature produced a non-finite value");
    // Absolute floor keeps near-zero integrals from being reported as failures.
    if (err > std::max(1e-6 * l1, 1e-10)) throw NumericalError("quadrature did not converge");
    return value;
}

/// Integrates over [a, b] split at every breakpoint strictly inside it.
template <class F>
double integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                           double tol = kTolerance) {
    std::vector<double> nodes{a};
    for (double x : breaks)
        if (x > a && x < b) nodes.push_back(x);
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) total += integrate(f, nodes[i], nodes[i + 1], tol);
    return total;
}

}  // namespace hazmix::quad

#endif  // HAZMIX_QUADRATURE_HPP
