#pragma once

#include <cmath>

#include "mqopt/common.hpp"

namespace mqopt {

/// Approximation guarantee of the ratio greedy, evaluated at an optimum
/// with value f_theta and additive cost c_theta: the returned answer is
/// at least factor * f_theta. With gamma = f_theta / c_theta the factor
/// equals 1 - ln(1 + gamma) / gamma, the matching hardness threshold.
struct Bound {
    double f_theta = 0.0;
    double c_theta = 0.0;
    double factor = 1.0;
};

inline Bound approx_bound(double f_theta, double c_theta) {
    if (!(f_theta > 0.0))
        throw ArgumentError("approx_bound: requires f_theta > 0, the guarantee is vacuous otherwise");
    if (c_theta < 0.0) throw ArgumentError("approx_bound: requires c_theta >= 0");
    Bound b;
    b.f_theta = f_theta;
    b.c_theta = c_theta;
    b.factor = (c_theta == 0.0) ? 1.0 : 1.0 - (c_theta / f_theta) * std::log1p(f_theta / c_theta);
    return b;
}

}  // namespace mqopt
