#ifndef HAZMIX_SLICE_HPP
#define HAZMIX_SLICE_HPP

#include <cmath>
#include <random>

#include "hazmix/errors.hpp"

namespace hazmix {

/// One univariate slice-sampling transition with stepping out and
/// shrinkage. `log_f` is an unnormalized log density; `width` is the initial
/// bracket width and `max_steps` bounds the total number of expansions.
template <class LogF, class Rng>
double slice_sample(double x0, LogF&& log_f, Rng& rng, double width = 1.0, int max_steps = 50) {
    const double f0 = log_f(x0);
    if (!std::isfinite(f0)) throw NumericalError("slice_sample: log density is not finite at the current point");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    const double level = f0 - expo(rng);

    double lo = x0 - width * unif(rng);
    double hi = lo + width;
    int left = static_cast<int>(std::floor(max_steps * unif(rng)));
    int right = max_steps - 1 - left;
    while (left-- > 0 && log_f(lo) > level) lo -= width;
    while (right-- > 0 && log_f(hi) > level) hi += width;

    for (int iter = 0; iter < 10000; ++iter) {
        const double x = lo + (hi - lo) * unif(rng);
        if (log_f(x) > level) return x;
        if (x < x0)
            lo = x;
        else
            hi = x;
    }
    throw NumericalError("slice_sample: shrinkage did not terminate");
}

}  // namespace hazmix

#endif  // HAZMIX_SLICE_HPP
