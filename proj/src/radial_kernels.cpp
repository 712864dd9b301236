#include "tvcert/radial_kernels.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "tvcert/bessel.hpp"
#include "tvcert/errors.hpp"
#include "tvcert/quadrature.hpp"

namespace tvcert::kernels {

GaussianKernel::GaussianKernel(double width, SigmaConvention convention) {
    if (!(width > 0.0) || !std::isfinite(width))
        throw InvalidArgument("Gaussian kernel width must be positive and finite");
    stddev_ = convention == SigmaConvention::Variance ? std::sqrt(width) : width;
}

double GaussianKernel::doubled_stddev() const noexcept { return std::numbers::sqrt2 * stddev_; }

double GaussianKernel::operator()(double x, double y) const noexcept {
    const double s2 = stddev_ * stddev_;
    return std::exp(-(x * x + y * y) / (2.0 * s2)) / (2.0 * std::numbers::pi * s2);
}

void RadialProfile::validate() const {
    if (grid.size() != values.size()) throw InvalidArgument("radial profile: size mismatch");
    if (!grid.empty() && !(grid.front() >= 0.0))
        throw InvalidArgument("radial profile: grid must start at a nonnegative radius");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidArgument("radial profile: grid must be strictly increasing");
    for (double v : values)
        if (!std::isfinite(v)) throw InvalidArgument("radial profile: non-finite value");
}

namespace {

void check_args(double tau, double R, double r) {
    if (!(tau > 0.0) || !(R > 0.0) || !(r >= 0.0))
        throw InvalidArgument("radial kernel: need tau > 0, R > 0, r >= 0");
}

// Gaussian factor of the circle kernel, (R/tau^2) e^{-(r-R)^2/2tau^2}.
double circle_envelope(double tau, double R, double r) {
    const double t2 = tau * tau;
    const double d = r - R;
    return (R / t2) * std::exp(-d * d / (2.0 * t2));
}

}  // namespace

double disk_conv(double tau, double R, double r) {
    check_args(tau, R, r);
    const double t2 = tau * tau;
    // Beyond ~38 standard deviations the result underflows any useful tolerance.
    if (r - R > 38.0 * tau) return 0.0;
    auto integrand = [&](double s) {
        const double d = r - s;
        return (s / t2) * std::exp(-d * d / (2.0 * t2)) * i0e(r * s / t2);
    };
    const std::array<double, 3> breaks{r - 8.0 * tau, r, r + 8.0 * tau};
    const auto res = quad::integrate(integrand, 0.0, R, 1e-13, 1e-14, breaks);
    return std::min(1.0, std::max(0.0, res.value));
}

double circle_conv(double tau, double R, double r) {
    check_args(tau, R, r);
    return circle_envelope(tau, R, r) * i0e(r * R / (tau * tau));
}

double disk_conv_dr(double tau, double R, double r) {
    check_args(tau, R, r);
    return -circle_envelope(tau, R, r) * i1e(r * R / (tau * tau));
}

double circle_conv_dr(double tau, double R, double r) {
    check_args(tau, R, r);
    const double t2 = tau * tau;
    const double x = r * R / t2;
    return circle_envelope(tau, R, r) * ((R / t2) * i1e(x) - (r / t2) * i0e(x));
}

}  // namespace tvcert::kernels
