#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "tvcert/bessel.hpp"
#include "tvcert/errors.hpp"
#include "tvcert/radial_kernels.hpp"

using namespace tvcert;
using namespace tvcert::kernels;

namespace {
const double kTau02 = 0.2 * std::numbers::sqrt2;

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("i0e and i1e at zero") {
    CHECK(i0e(0.0) == 1.0);
    CHECK(i1e(0.0) == 0.0);
}

TEST_CASE("i0e and i1e frozen reference values") {
    // 40-digit power series and mpmath Bessel values.
    struct Row {
        double x, i0e, i1e;
    };
    const Row rows[] = {
        {1.0, 0.46575960759364043654, 0.20791041534970844887},
        {5.0, 0.18354081260932835307, 0.16397226694454235693},
        {20.0, 0.089780311884826021596, 0.087506222183288665356},
        {50.0, 0.05656162664745419253, 0.055993123892895399644},
        {1e3, 0.012617240455891256586, 0.01261093025692862947},
        {1e6, 0.00039894233026924577878, 0.00039894213079803077631},
    };
    for (const auto& r : rows) {
        CAPTURE(r.x);
        CHECK(rel_err(i0e(r.x), r.i0e) <= 1e-12);
        CHECK(rel_err(i1e(r.x), r.i1e) <= 1e-12);
    }
}

TEST_CASE("i0e and i1e against long-double series and Boost over the full range") {
    for (double x = 0.05; x <= 30.0; x += 0.05) {
        const long double e = std::exp(-static_cast<long double>(x));
        CAPTURE(x);
        CHECK(rel_err(i0e(x), static_cast<double>(e * oracle::i0_series(x))) <= 1e-12);
        CHECK(rel_err(i1e(x), static_cast<double>(e * oracle::i1_series(x))) <= 1e-12);
    }
    // Unscaled Boost values overflow beyond x ~ 700.
    for (double x = 30.0; x <= 700.0; x *= 1.1) {
        CAPTURE(x);
        CHECK(rel_err(i0e(x), boost::math::cyl_bessel_i(0, x) * std::exp(-x)) <= 1e-12);
        CHECK(rel_err(i1e(x), boost::math::cyl_bessel_i(1, x) * std::exp(-x)) <= 1e-12);
    }
    for (double x = 1e3; x <= 1e6; x *= 3.0) {
        CHECK(std::isfinite(i0e(x)));
        CHECK(std::isfinite(i1e(x)));
        // two-term Hankel expansion; the next terms are 0.073/x^3 and 0.103/x^3
        const double s = std::sqrt(2 * std::numbers::pi * x), rem = 0.11 / (x * x * x) + 1e-14;
        CHECK(std::abs(i0e(x) * s - (1 + 1 / (8 * x) + 9 / (128 * x * x))) < rem);
        CHECK(std::abs(i1e(x) * s - (1 - 3 / (8 * x) - 15 / (128 * x * x))) < rem);
    }
}

TEST_CASE("GaussianKernel validates and converts widths") {
    CHECK_THROWS_AS(GaussianKernel(0.0), InvalidArgument);
    CHECK_THROWS_AS(GaussianKernel(-1.0), InvalidArgument);
    CHECK(GaussianKernel(0.04, SigmaConvention::Variance).stddev() == doctest::Approx(0.2));
    CHECK(GaussianKernel(0.2).doubled_stddev() == doctest::Approx(kTau02));
    // unit mass
    const GaussianKernel h(0.3);
    double mass = 0.0;
    const double dx = 0.01;
    for (double x = -3; x < 3; x += dx)
        for (double y = -3; y < 3; y += dx) mass += h(x + dx / 2, y + dx / 2) * dx * dx;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("RadialProfile validation") {
    RadialProfile p{{0.0, 0.5, 1.0}, {1.0, 2.0, 3.0}, "ok"};
    CHECK_NOTHROW(p.validate());
    p.grid = {0.0, 0.5, 0.5};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.grid = {-0.1, 0.5, 1.0};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.grid = {0.0, 0.5};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.grid = {0.0, 0.5, 1.0};
    p.values[1] = NAN;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("disk_conv closed-form special values") {
    for (double tau : {0.1, 0.3, 1.0})
        for (double R : {0.5, 1.0, 2.0}) {
            CHECK(disk_conv(tau, R, 0.0) ==
                  doctest::Approx(1.0 - std::exp(-R * R / (2 * tau * tau))).epsilon(1e-12));
            CHECK(disk_conv(tau, R, R + 10 * tau) < 1e-15);
        }
}

TEST_CASE("disk_conv, circle_conv and circle_conv_dr frozen reference values") {
    // mpmath: polar double integral, angular integral, and its derivative.
    CHECK(disk_conv(kTau02, 1.0, 0.5) == doctest::Approx(0.94138859828688419812).epsilon(1e-10));
    CHECK(circle_conv(kTau02, 1.0, 1.0) == doctest::Approx(1.4252741182786112616).epsilon(1e-12));
    CHECK(circle_conv_dr(kTau02, 1.0, 1.2) == doctest::Approx(-2.9576496278737772544).epsilon(1e-10));
}

TEST_CASE("circle_conv special values and mass") {
    for (double tau : {0.1, 0.3})
        for (double R : {0.5, 1.0}) {
            CHECK(circle_conv(tau, R, 0.0) ==
                  doctest::Approx(R / (tau * tau) * std::exp(-R * R / (2 * tau * tau))));
            CHECK(circle_conv_dr(tau, R, 0.0) == 0.0);
            const double mass = 2 * std::numbers::pi *
                                boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                    [&](double s) { return circle_conv(tau, R, s) * s; }, 0.0,
                                    R + 15 * tau, 15, 1e-14);
            CHECK(std::abs(mass - 2 * std::numbers::pi * R) <= 1e-9);
        }
}

TEST_CASE("convolutions agree with nested quadrature oracles") {
    for (double sigma : {0.1, 0.2, 0.5})
        for (double R : {0.5, 1.0, 1.5}) {
            const double tau = sigma * std::numbers::sqrt2;
            const double r_max = R + 6 * tau;
            double worst_disk = 0.0, worst_circle = 0.0;
            for (int k = 0; k < 200; ++k) {
                const double r = r_max * k / 199.0;
                worst_disk = std::max(worst_disk, std::abs(disk_conv(tau, R, r) - oracle::disk_conv(tau, R, r)));
                worst_circle =
                    std::max(worst_circle, std::abs(circle_conv(tau, R, r) - oracle::circle_conv(tau, R, r)));
            }
            CAPTURE(sigma);
            CAPTURE(R);
            CHECK(worst_disk <= 1e-8);
            CHECK(worst_circle <= 1e-8);
        }
}

TEST_CASE("disk_conv is nonincreasing and circle_conv peaks near R") {
    for (double tau : {0.14, 0.4})
        for (double R : {0.5, 1.5}) {
            double prev = disk_conv(tau, R, 0.0);
            double best = -1, arg = 0;
            for (int k = 1; k <= 2000; ++k) {
                const double r = (R + 6 * tau) * k / 2000.0;
                const double d = disk_conv(tau, R, r);
                CHECK(d <= prev + 1e-15);
                CHECK(disk_conv_dr(tau, R, r) <= 0.0);
                prev = d;
                const double c = circle_conv(tau, R, r);
                if (c > best) best = c, arg = r;
            }
            // the origin is a local maximum when R^2 < 2 tau^2
            if (R > 2 * tau) CHECK(arg >= R - tau);
            CHECK(arg <= R + tau);
        }
}

TEST_CASE("analytic radial derivatives match central differences") {
    const double h = 1e-6;
    for (double tau : {0.14, 0.28, 0.7})
        for (double R : {0.5, 1.0, 1.5})
            for (double r = 0.05; r < R + 6 * tau; r += 0.05) {
                const double fd_disk = (disk_conv(tau, R, r + h) - disk_conv(tau, R, r - h)) / (2 * h);
                const double fd_circ = (circle_conv(tau, R, r + h) - circle_conv(tau, R, r - h)) / (2 * h);
                CHECK(std::abs(disk_conv_dr(tau, R, r) - fd_disk) <= 1e-6);
                CHECK(std::abs(circle_conv_dr(tau, R, r) - fd_circ) <= 1e-6);
            }
}

TEST_CASE("kernels stay finite at large Bessel arguments") {
    // rR / tau^2 = 1e6
    const double tau = 1e-3, R = 1.0;
    for (double r : {0.999, 1.0, 1.001}) {
        CHECK(std::isfinite(circle_conv(tau, R, r)));
        CHECK(std::isfinite(circle_conv_dr(tau, R, r)));
        CHECK(std::isfinite(disk_conv(tau, R, r)));
        CHECK(std::isfinite(disk_conv_dr(tau, R, r)));
    }
    CHECK(disk_conv(tau, R, 1.0) == doctest::Approx(0.5).epsilon(2e-3));
}
