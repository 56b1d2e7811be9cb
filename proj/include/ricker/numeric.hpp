// numeric.hpp
//
// One-dimensional minimisation shared by the theory and estimator code.
#pragma once

#include <algorithm>
#include <cmath>

namespace ricker::detail {

inline constexpr double kGolden = 0.6180339887498949;

// Golden-section search for the minimum of `fn` on [lo, hi].
template <class Fn>
double golden_minimize(Fn&& fn, double lo, double hi, double rel_tol, int max_iter = 500)
{
    double a = lo;
    double b = hi;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double fc = fn(c);
    double fd = fn(d);
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(b - a) <= rel_tol * std::max(std::abs(a) + std::abs(b), 1e-300)) {
            break;
        }
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kGolden * (b - a);
            fc = fn(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kGolden * (b - a);
            fd = fn(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace ricker::detail
