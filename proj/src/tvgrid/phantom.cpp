#include "tvcert/tvgrid/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tvcert/errors.hpp"

namespace tvcert::tvgrid {

Phantom::Kind Phantom::parse_kind(const std::string& name) {
    if (name == "disk") return Kind::Disk;
    if (name == "annulus") return Kind::Annulus;
    if (name == "three_shapes") return Kind::ThreeShapes;
    throw InvalidArgument("unknown phantom '" + name + "'");
}

std::string to_string(Phantom::Kind kind) {
    switch (kind) {
        case Phantom::Kind::Disk: return "disk";
        case Phantom::Kind::Annulus: return "annulus";
        case Phantom::Kind::ThreeShapes: return "three_shapes";
    }
    return "unknown";
}

GridImage rasterize(const std::function<double(double, double)>& f, std::size_t rows,
                    std::size_t cols, double pixel_size) {
    GridImage img(rows, cols, pixel_size);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) img(i, j) = f(img.x_center(j), img.y_center(i));
    return img;
}

namespace {

struct Blob {
    double cx, cy, radius, amplitude;
    // radius(theta) = radius * (1 + a2 cos(2(theta - p2)) + a3 cos(3(theta - p3)))
    double a2, p2, a3, p3;

    bool contains(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double th = std::atan2(dy, dx);
        const double rho = radius * (1.0 + a2 * std::cos(2.0 * (th - p2)) +
                                     a3 * std::cos(3.0 * (th - p3)));
        return dx * dx + dy * dy <= rho * rho;
    }
};

}  // namespace

GridImage make_phantom(const Phantom& phantom, std::size_t rows, std::size_t cols,
                       double pixel_size) {
    if (rows == 0 || cols == 0 || !(pixel_size > 0.0))
        throw InvalidDims("make_phantom: dims and pixel size must be positive");
    switch (phantom.kind) {
        case Phantom::Kind::Disk: {
            if (!(phantom.r1 > 0.0)) throw InvalidArgument("disk radius must be positive");
            const double r2 = phantom.r1 * phantom.r1;
            return rasterize([r2](double x, double y) { return x * x + y * y <= r2 ? 1.0 : 0.0; },
                             rows, cols, pixel_size);
        }
        case Phantom::Kind::Annulus: {
            if (!(phantom.r1 > 0.0) || !(phantom.r2 > phantom.r1))
                throw InvalidArgument("annulus needs 0 < inner < outer");
            const double a = phantom.r1 * phantom.r1, b = phantom.r2 * phantom.r2;
            return rasterize(
                [a, b](double x, double y) {
                    const double q = x * x + y * y;
                    return q >= a && q <= b ? 1.0 : 0.0;
                },
                rows, cols, pixel_size);
        }
        case Phantom::Kind::ThreeShapes: {
            const double W = static_cast<double>(std::min(rows, cols)) * pixel_size;
            constexpr double pi = std::numbers::pi;
            const Blob blobs[] = {
                {-0.22 * W, -0.20 * W, 0.14 * W, 1.0, 0.12, 0.3, 0.06, 1.1},
                {0.22 * W, -0.15 * W, 0.12 * W, 2.0, 0.10, pi / 3, 0.08, 0.2},
                {0.00 * W, 0.24 * W, 0.13 * W, -2.0, 0.15, -0.4, 0.05, 2.0},
            };
            return rasterize(
                [&blobs](double x, double y) {
                    for (const Blob& b : blobs)
                        if (b.contains(x, y)) return b.amplitude;
                    return 0.0;
                },
                rows, cols, pixel_size);
        }
    }
    throw InvalidArgument("make_phantom: unknown kind");
}

GridImage add_noise(const GridImage& y, double stddev, std::uint64_t seed) {
    if (!(stddev >= 0.0) || !std::isfinite(stddev))
        throw InvalidArgument("noise standard deviation must be non-negative");
    GridImage out = y;
    if (stddev == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, stddev);
    for (double& v : out.data()) v += normal(rng);
    return out;
}

}  // namespace tvcert::tvgrid
