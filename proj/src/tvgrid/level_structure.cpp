#include "tvcert/tvgrid/level_structure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "tvcert/errors.hpp"

namespace tvcert::tvgrid {

LevelStructure level_structure(const GridImage& u, double threshold_fraction,
                               std::size_t min_pixels) {
    if (!(threshold_fraction > 0.0) || threshold_fraction > 1.0)
        throw InvalidArgument("threshold fraction must lie in (0, 1]");
    for (double v : u.data())
        if (!std::isfinite(v)) throw InvalidArgument("level_structure: image must be finite");
    LevelStructure out;
    const double peak = u.max_abs();
    out.threshold = threshold_fraction * peak;
    if (peak == 0.0) return out;

    const std::size_t n = u.rows(), m = u.cols();
    auto sign_of = [&](std::size_t k) -> int {
        const double v = u.data()[k];
        if (std::abs(v) < out.threshold) return 0;
        return v > 0.0 ? 1 : -1;
    };
    std::vector<char> seen(n * m, 0);
    std::vector<std::size_t> stack;
    std::vector<double> values;
    const double cell = u.pixel_size() * u.pixel_size();
    for (std::size_t start = 0; start < n * m; ++start) {
        const int s = sign_of(start);
        if (s == 0 || seen[start]) continue;
        Component c;
        c.sign = s;
        c.row_min = c.row_max = start / m;
        c.col_min = c.col_max = start % m;
        double sum = 0.0;
        values.clear();
        stack.assign(1, start);
        seen[start] = 1;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            const std::size_t i = k / m, j = k % m;
            ++c.pixel_count;
            sum += u.data()[k];
            values.push_back(u.data()[k]);
            c.row_min = std::min(c.row_min, i);
            c.row_max = std::max(c.row_max, i);
            c.col_min = std::min(c.col_min, j);
            c.col_max = std::max(c.col_max, j);
            auto visit = [&](std::size_t q) {
                if (!seen[q] && sign_of(q) == s) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            };
            if (i > 0) visit(k - m);
            if (i + 1 < n) visit(k + m);
            if (j > 0) visit(k - 1);
            if (j + 1 < m) visit(k + 1);
        }
        if (c.pixel_count < min_pixels) continue;
        c.area = static_cast<double>(c.pixel_count) * cell;
        c.mean_amplitude = sum / static_cast<double>(c.pixel_count);
        std::sort(values.begin(), values.end());
        const std::size_t h = values.size() / 2;
        c.median_amplitude = values.size() % 2 ? values[h] : 0.5 * (values[h - 1] + values[h]);
        out.components.push_back(c);
    }
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const Component& a, const Component& b) {
                         return a.pixel_count > b.pixel_count;
                     });
    return out;
}

void write_level_structure_csv(std::ostream& out, const LevelStructure& s) {
    out << "index,pixel_count,area,mean_amplitude,median_amplitude,sign,row_min,row_max,col_min,"
           "col_max\n";
    char buf[320];
    for (std::size_t k = 0; k < s.components.size(); ++k) {
        const Component& c = s.components[k];
        std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g,%.17g,%d,%zu,%zu,%zu,%zu\n", k,
                      c.pixel_count, c.area, c.mean_amplitude, c.median_amplitude, c.sign, c.row_min, c.row_max,
                      c.col_min, c.col_max);
        out << buf;
    }
}

}  // namespace tvcert::tvgrid
