#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "tvcert/tvgrid/grid_image.hpp"

namespace tvcert::tvgrid {

struct Phantom {
    enum class Kind { Disk, Annulus, ThreeShapes };
    Kind kind = Kind::Disk;
    double r1 = 1.0;  // disk radius, or annulus inner radius
    double r2 = 2.0;  // annulus outer radius

    static Phantom disk(double radius) { return {Kind::Disk, radius, 0.0}; }
    static Phantom annulus(double inner, double outer) { return {Kind::Annulus, inner, outer}; }
    static Phantom three_shapes() { return {Kind::ThreeShapes, 0.0, 0.0}; }
    /// "disk", "annulus" or "three_shapes"; throws InvalidArgument otherwise.
    static Kind parse_kind(const std::string& name);
};

std::string to_string(Phantom::Kind kind);

/// Rasterizes by pixel-center membership on a grid centered at the origin.
/// three_shapes places three disjoint smooth star-shaped blobs with
/// amplitudes 1, 2 and -2, scaled to the grid extent.
GridImage make_phantom(const Phantom& phantom, std::size_t rows, std::size_t cols,
                       double pixel_size);

/// Samples f at pixel centers.
GridImage rasterize(const std::function<double(double x, double y)>& f, std::size_t rows,
                    std::size_t cols, double pixel_size);

/// Adds i.i.d. N(0, stddev^2) noise per pixel, seeded deterministically.
GridImage add_noise(const GridImage& y, double stddev, std::uint64_t seed);

}  // namespace tvcert::tvgrid
