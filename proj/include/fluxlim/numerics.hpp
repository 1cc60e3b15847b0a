#pragma once

#include <cmath>

namespace fluxlim {

// sign(x)|x|^q: continuous-at-zero evaluation of |x|^(q-1) x for q in (0,1).
inline double signed_pow(double x, double q) {
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), q), x);
}

} // namespace fluxlim
