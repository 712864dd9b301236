#pragma once

namespace tvcert {

/// Exponentially scaled modified Bessel function e^{-x} I_0(x), x >= 0.
double i0e(double x);

/// Exponentially scaled modified Bessel function e^{-x} I_1(x), x >= 0.
double i1e(double x);

}  // namespace tvcert
