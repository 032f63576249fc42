#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace gak {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// log(e^a + e^b + e^c), max-shifted. -inf is absorbing: if every argument is
// -inf the result is -inf rather than NaN.
inline double logsumexp3(double a, double b, double c) noexcept {
    const double m = std::max({a, b, c});
    if (m == neg_inf) return neg_inf;
    return m + std::log(std::exp(a - m) + std::exp(b - m) + std::exp(c - m));
}

inline double logsumexp2(double a, double b) noexcept {
    const double m = std::max(a, b);
    if (m == neg_inf) return neg_inf;
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

}  // namespace gak
