#pragma once

#include <cmath>
#include <cstdint>

namespace uexp::detail {

// (1 - a)^e, or 0 when the indicator 1{a <= 1} fails.
inline double sift_term(double a, std::int64_t e) {
    if (a > 1.0) return 0.0;
    if (e == 0) return 1.0;
    if (a == 1.0) return 0.0;
    return std::exp(static_cast<double>(e) * std::log1p(-a));
}

}  // namespace uexp::detail
