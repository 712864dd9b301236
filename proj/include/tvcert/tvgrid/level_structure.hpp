#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "tvcert/tvgrid/grid_image.hpp"

namespace tvcert::tvgrid {

struct Component {
    std::size_t pixel_count = 0;
    double area = 0.0;  // pixel_count * pixel_size^2
    double mean_amplitude = 0.0;
    double median_amplitude = 0.0;
    int sign = 0;
    // inclusive pixel bounding box
    std::size_t row_min = 0, row_max = 0, col_min = 0, col_max = 0;
};

struct LevelStructure {
    double threshold = 0.0;  // absolute level, threshold_fraction * max|u|
    std::vector<Component> components;
    std::size_t component_count() const noexcept { return components.size(); }
};

/// 4-connected components of {|u| >= fraction * max|u|}, positive and
/// negative parts labelled separately, sorted by area descending. Components
/// smaller than `min_pixels` are dropped. A zero image has no components.
LevelStructure level_structure(const GridImage& u, double threshold_fraction = 0.5,
                               std::size_t min_pixels = 1);

void write_level_structure_csv(std::ostream& out, const LevelStructure& s);

}  // namespace tvcert::tvgrid
