#ifndef HAZMIX_POLYAPPROX_HPP
#define HAZMIX_POLYAPPROX_HPP

// Orthonormal shifted Jacobi bases on [0, 1] and moment-based density
// reconstruction
//
//   f_N(s) = w_{a,b}(s) * sum_{i<=N} lambda_i G_i(s),
//   lambda_i = sum_{r<=i} G_{i,r} mu_r,
//
// where w_{a,b}(s) = s^{a-1} (1-s)^{b-1} and <G_i, G_j>_w = delta_ij.
//
// The monomial table G_{i,r} is ill-conditioned for large N, so it is built
// in a caller-chosen extended precision `Real`; point evaluation goes through
// the three-term recurrence in long double, which is stable.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "hazmix/errors.hpp"

namespace hazmix {

struct WeightParams {
    double a = 1.0;
    double b = 1.0;

    WeightParams() = default;
    WeightParams(double a_, double b_) : a(a_), b(b_) {
        if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
            throw std::invalid_argument("WeightParams: a and b must be positive and finite");
    }

    /// w_{a,b}(s); infinite at an endpoint whose exponent is negative.
    [[nodiscard]] long double weight(long double s) const {
        return std::pow(s, static_cast<long double>(a) - 1.0L) *
               std::pow(1.0L - s, static_cast<long double>(b) - 1.0L);
    }

    [[nodiscard]] long double log_beta() const {
        const long double la = a, lb = b;
        return std::lgamma(la) + std::lgamma(lb) - std::lgamma(la + lb);
    }
};

/// Beta(a, b) parameters whose first two moments are (mu1, mu2), or nullopt
/// when the variance is below 1e-12 and the law is effectively a point mass.
inline std::optional<WeightParams> beta_matched_weight(double mu1, double mu2) {
    const double var = mu2 - mu1 * mu1;
    if (var < 1e-12) return std::nullopt;
    const double common = (mu1 - mu2) / var;
    const double a = mu1 * common;
    const double b = (1.0 - mu1) * common;
    if (!(a > 0.0) || !(b > 0.0))
        throw NumericalError("beta_matched_weight: moments are not those of a [0,1] law");
    return WeightParams{a, b};
}

/// Largest tolerated |G_{N,r}| / G_0 for a table held in `Real`: 1e12 at
/// 80-bit precision, scaled by the machine epsilon of wider types.
template <class Real>
[[nodiscard]] long double conditioning_limit() {
    const long double eps_ld = std::numeric_limits<long double>::epsilon();
    const long double eps_real = static_cast<long double>(std::numeric_limits<Real>::epsilon());
    return 1e12L * (eps_ld / eps_real);
}

template <class Real = long double>
class JacobiBasis {
public:
    JacobiBasis(WeightParams params, int order) : params_(params), order_(order) {
        if (order < 0) throw std::invalid_argument("JacobiBasis: order must be nonnegative");
        build_recurrence();
        build_table();
        const long double limit = conditioning_limit<Real>();
        // Relative to G_0, i.e. the basis orthonormal under the Beta probability
        // law, so the check does not depend on the size of B(a, b).
        const long double biggest = max_abs_coeff(order_) / g0_;
        if (!(biggest <= limit)) {
            std::ostringstream msg;
            msg << "JacobiBasis: order " << order_ << " with weight (" << params_.a << ", " << params_.b
                << ") has max |G_{N,r}| / G_0 = " << static_cast<double>(biggest) << " above the conditioning limit "
                << static_cast<double>(limit);
            throw NumericalError(msg.str());
        }
    }

    [[nodiscard]] int order() const { return order_; }
    [[nodiscard]] const WeightParams& params() const { return params_; }

    /// Monomial coefficient G_{i,r}, 0 <= r <= i <= N.
    [[nodiscard]] const Real& coeff(int i, int r) const { return table_[index(i, r)]; }

    [[nodiscard]] long double max_abs_coeff(int i) const {
        long double m = 0.0L;
        for (int r = 0; r <= i; ++r) {
            using std::abs;
            m = std::max(m, static_cast<long double>(abs(coeff(i, r))));
        }
        return m;
    }

    /// G_0(s), ..., G_N(s) by the three-term recurrence.
    void evaluate(long double s, std::span<long double> out) const {
        out[0] = g0_;
        if (order_ == 0) return;
        out[1] = (s - diag_[0]) * out[0] / offdiag_[1];
        for (int i = 1; i < order_; ++i)
            out[i + 1] = ((s - diag_[i]) * out[i] - offdiag_[i] * out[i - 1]) / offdiag_[i + 1];
    }

    [[nodiscard]] std::vector<long double> evaluate(long double s) const {
        std::vector<long double> out(order_ + 1);
        evaluate(s, out);
        return out;
    }

    /// sum_i c_i G_i(s), accumulated along the forward recurrence.
    [[nodiscard]] long double series(std::span<const long double> c, long double s) const {
        long double prev = 0.0L, cur = g0_;
        long double sum = c[0] * cur;
        for (int i = 0; i < order_; ++i) {
            const long double next =
                ((s - diag_[i]) * cur - (i > 0 ? offdiag_[i] * prev : 0.0L)) / offdiag_[i + 1];
            prev = cur;
            cur = next;
            sum += c[i + 1] * cur;
        }
        return sum;
    }

private:
    [[nodiscard]] static std::size_t index(int i, int r) {
        return static_cast<std::size_t>(i) * (i + 1) / 2 + r;
    }

    // Jacobi matrix of w_{a,b}(s) ds on [0,1], from the classical recurrence
    // on [-1,1] with alpha = b - 1, beta = a - 1 and x = 2s - 1.
    void build_recurrence() {
        const Real a = Real(params_.a);
        const Real b = Real(params_.b);
        const Real one = Real(1), two = Real(2), four = Real(4);
        const Real al = b - one;
        const Real be = a - one;
        const Real sum = al + be;
        diag_real_.assign(order_ + 1, Real(0));
        offdiag_real_.assign(order_ + 2, Real(0));
        for (int n = 0; n <= order_; ++n) {
            Real an;
            if (n == 0) {
                an = (be - al) / (sum + two);
            } else {
                const Real k = two * Real(n) + sum;
                an = (be * be - al * al) / (k * (k + two));
            }
            diag_real_[n] = (an + one) / two;
        }
        for (int n = 1; n <= order_ + 1; ++n) {
            Real bn;
            if (n == 1) {
                bn = four * (one + al) * (one + be) / ((two + sum) * (two + sum) * (Real(3) + sum));
            } else {
                const Real nn = Real(n);
                const Real k = two * nn + sum;
                bn = four * nn * (nn + al) * (nn + be) * (nn + sum) / (k * k * (k + one) * (k - one));
            }
            using std::sqrt;
            offdiag_real_[n] = sqrt(bn) / two;
        }
        diag_.resize(diag_real_.size());
        offdiag_.resize(offdiag_real_.size());
        for (std::size_t i = 0; i < diag_real_.size(); ++i) diag_[i] = static_cast<long double>(diag_real_[i]);
        for (std::size_t i = 0; i < offdiag_real_.size(); ++i)
            offdiag_[i] = static_cast<long double>(offdiag_real_[i]);
        g0_ = std::exp(-0.5L * params_.log_beta());
    }

    void build_table() {
        table_.assign(index(order_, order_) + 1, Real(0));
        table_[index(0, 0)] = Real(g0_);
        if (order_ == 0) return;
        for (int i = 0; i < order_; ++i) {
            // G_{i+1} = ((s - d_i) G_i - e_i G_{i-1}) / e_{i+1}
            for (int r = 0; r <= i + 1; ++r) {
                Real v(0);
                if (r >= 1) v += coeff(i, r - 1);
                if (r <= i) v -= diag_real_[i] * coeff(i, r);
                if (i >= 1 && r <= i - 1) v -= offdiag_real_[i] * coeff(i - 1, r);
                table_[index(i + 1, r)] = v / offdiag_real_[i + 1];
            }
        }
    }

    WeightParams params_;
    int order_;
    std::vector<Real> diag_real_, offdiag_real_;
    std::vector<long double> diag_, offdiag_;
    long double g0_ = 1.0L;
    std::vector<Real> table_;
};

/// Raw moments mu_0 = 1, mu_1, ..., mu_N of a [0,1]-valued variable.
template <class Real = long double>
class MomentSequence {
public:
    explicit MomentSequence(std::vector<Real> values, double tol = 1e-12) : values_(std::move(values)) {
        using std::abs;
        if (values_.empty() || abs(values_[0] - Real(1)) > Real(tol))
            throw std::invalid_argument("MomentSequence: mu_0 must equal 1");
        for (std::size_t r = 1; r < values_.size(); ++r) {
            if (values_[r] < Real(-tol) || values_[r] > values_[r - 1] + Real(tol))
                throw std::invalid_argument("MomentSequence: moments of a [0,1] law must be nonincreasing and nonnegative");
        }
    }

    [[nodiscard]] int order() const { return static_cast<int>(values_.size()) - 1; }
    [[nodiscard]] const Real& operator[](std::size_t r) const { return values_[r]; }
    [[nodiscard]] const std::vector<Real>& values() const { return values_; }

private:
    std::vector<Real> values_;
};

template <class Real = long double>
class ApproxDensity {
public:
    ApproxDensity(std::shared_ptr<const JacobiBasis<Real>> basis, std::vector<Real> lambda)
        : basis_(std::move(basis)), lambda_(std::move(lambda)) {
        lambda_ld_.reserve(lambda_.size());
        for (const Real& l : lambda_) lambda_ld_.push_back(static_cast<long double>(l));
    }

    [[nodiscard]] const JacobiBasis<Real>& basis() const { return *basis_; }
    [[nodiscard]] const WeightParams& weight() const { return basis_->params(); }
    [[nodiscard]] int order() const { return basis_->order(); }
    [[nodiscard]] const std::vector<Real>& lambda() const { return lambda_; }

    /// f_N(s) / w_{a,b}(s): the polynomial part, finite on all of [0,1].
    [[nodiscard]] long double polynomial(long double s) const { return basis_->series(lambda_ld_, s); }

    [[nodiscard]] long double fN(long double s) const {
        check_unit(s);
        return basis_->params().weight(s) * polynomial(s);
    }

    [[nodiscard]] long double piN_unnorm(long double s) const { return std::max(fN(s), 0.0L); }

private:
    static void check_unit(long double s) {
        if (!(s >= 0.0L && s <= 1.0L)) throw std::domain_error("ApproxDensity: s outside [0,1]");
    }

    std::shared_ptr<const JacobiBasis<Real>> basis_;
    std::vector<Real> lambda_;
    std::vector<long double> lambda_ld_;
};

template <class Real = long double>
[[nodiscard]] std::shared_ptr<const JacobiBasis<Real>> build_basis(WeightParams params, int order) {
    return std::make_shared<const JacobiBasis<Real>>(params, order);
}

template <class Real>
[[nodiscard]] ApproxDensity<Real> coefficients_from_moments(std::shared_ptr<const JacobiBasis<Real>> basis,
                                                            const MomentSequence<Real>& moments) {
    const int n = basis->order();
    if (moments.order() < n)
        throw std::invalid_argument("coefficients_from_moments: need at least N+1 moments");
    std::vector<Real> lambda(n + 1, Real(0));
    for (int i = 0; i <= n; ++i) {
        Real acc(0);
        for (int r = 0; r <= i; ++r) acc += basis->coeff(i, r) * moments[r];
        lambda[i] = acc;
    }
    return ApproxDensity<Real>(std::move(basis), std::move(lambda));
}

template <class Real>
[[nodiscard]] double eval_fN(const ApproxDensity<Real>& d, double s) {
    return static_cast<double>(d.fN(s));
}

template <class Real>
[[nodiscard]] double eval_piN_unnorm(const ApproxDensity<Real>& d, double s) {
    return static_cast<double>(d.piN_unnorm(s));
}

/// Beta-matched reconstruction used by the inference pipeline. The order is
/// lowered from `max_order` until the basis passes the conditioning check;
/// order 0 is the matched Beta density itself and always succeeds.
template <class Real = long double>
[[nodiscard]] ApproxDensity<Real> reconstruct(const MomentSequence<Real>& moments, WeightParams weight,
                                              int max_order) {
    for (int n = std::min(max_order, moments.order()); n > 0; --n) {
        if (n == 1) continue;  // order 1 adds nothing over order 0 with a matched weight
        try {
            return coefficients_from_moments(build_basis<Real>(weight, n), moments);
        } catch (const NumericalError&) {
        }
    }
    return coefficients_from_moments(build_basis<Real>(weight, 0), moments);
}

}  // namespace hazmix

#endif  // HAZMIX_POLYAPPROX_HPP
