#pragma once

#include <string>
#include <vector>

namespace tvcert::kernels {

/// How a user-supplied kernel width is to be read.
enum class SigmaConvention {
    StandardDeviation,  ///< h has covariance sigma^2 Id (default)
    Variance,           ///< h has covariance sigma Id
};

/// Isotropic 2D Gaussian h(x) = (2 pi s^2)^{-1} exp(-|x|^2 / 2 s^2) with unit mass.
class GaussianKernel {
public:
    /// Throws InvalidArgument unless width > 0.
    explicit GaussianKernel(double width,
                            SigmaConvention convention = SigmaConvention::StandardDeviation);

    double stddev() const noexcept { return stddev_; }
    /// Standard deviation of h * h, i.e. sqrt(2) * stddev().
    double doubled_stddev() const noexcept;
    double operator()(double x, double y) const noexcept;

private:
    double stddev_;
};

/// A radial function sampled on a strictly increasing grid of radii.
struct RadialProfile {
    std::vector<double> grid;
    std::vector<double> values;
    std::string meta;

    /// Throws InvalidArgument if the grid is not strictly increasing from a
    /// nonnegative start, sizes differ, or a value is not finite.
    void validate() const;
};

// The functions below evaluate convolutions with g_tau, the unit-mass Gaussian
// of standard deviation tau, at distance r from the origin. Preconditions:
// tau > 0, R > 0, r >= 0. All are pure and thread-safe.

/// (g_tau * 1_{B(0,R)})(r), accurate to 1e-10 absolute.
double disk_conv(double tau, double R, double r);

/// (g_tau * H^1 restricted to the circle of radius R)(r), closed form.
double circle_conv(double tau, double R, double r);

/// d/dr of disk_conv. Equals -(R/tau^2) e^{-(r^2+R^2)/2tau^2} I_1(rR/tau^2).
double disk_conv_dr(double tau, double R, double r);

/// d/dr of circle_conv.
double circle_conv_dr(double tau, double R, double r);

}  // namespace tvcert::kernels
