#include "tvcert/tvgrid/grid_image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "tvcert/errors.hpp"

namespace tvcert::tvgrid {

GridImage::GridImage(std::size_t rows, std::size_t cols, double pixel_size)
    : rows_(rows), cols_(cols), pixel_size_(pixel_size) {
    if (rows == 0 || cols == 0 || !(pixel_size > 0.0) || !std::isfinite(pixel_size))
        throw InvalidDims("grid image needs positive dimensions and pixel size");
    data_.assign(rows * cols, 0.0);
}

GridImage::GridImage(std::size_t rows, std::size_t cols, double pixel_size,
                     std::vector<double> data)
    : GridImage(rows, cols, pixel_size) {
    if (data.size() != rows * cols)
        throw InvalidDims("grid image data has " + std::to_string(data.size()) +
                          " values, expected " + std::to_string(rows * cols));
    for (double v : data)
        if (!std::isfinite(v)) throw InvalidArgument("grid image data must be finite");
    data_ = std::move(data);
}

double GridImage::x_center(std::size_t j) const {
    return (static_cast<double>(j) + 0.5 - 0.5 * static_cast<double>(cols_)) * pixel_size_;
}

double GridImage::y_center(std::size_t i) const {
    return (static_cast<double>(i) + 0.5 - 0.5 * static_cast<double>(rows_)) * pixel_size_;
}

double GridImage::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool GridImage::same_shape(const GridImage& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
}

double dot(const GridImage& a, const GridImage& b) {
    if (!a.same_shape(b)) throw DimensionMismatch("dot: grid shapes differ");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
    return s;
}

namespace {

std::uint64_t to_little(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
        return r;
    }
    return v;
}

}  // namespace

void write_grid(std::ostream& out, const GridImage& img) {
    char header[128];
    std::snprintf(header, sizeof header, "P_GRID %zu %zu %.17g\n", img.rows(), img.cols(),
                  img.pixel_size());
    out << header;
    for (double v : img.data()) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(v));
        char bytes[8];
        std::memcpy(bytes, &bits, 8);
        out.write(bytes, 8);
    }
    if (!out) throw Error("write_grid: stream failure");
}

void write_grid(const std::string& path, const GridImage& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path + " for writing");
    write_grid(f, img);
}

GridImage read_grid(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("read_grid: missing header");
    std::istringstream hs(line);
    std::string magic;
    std::size_t rows = 0, cols = 0;
    double pixel = 0.0;
    if (!(hs >> magic >> rows >> cols >> pixel) || magic != "P_GRID")
        throw InvalidArgument("read_grid: malformed header '" + line + "'");
    std::vector<double> data(rows * cols);
    for (double& v : data) {
        char bytes[8];
        if (!in.read(bytes, 8)) throw InvalidArgument("read_grid: truncated payload");
        std::uint64_t bits;
        std::memcpy(&bits, bytes, 8);
        v = std::bit_cast<double>(to_little(bits));
    }
    return {rows, cols, pixel, std::move(data)};
}

GridImage read_grid(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return read_grid(f);
}

}  // namespace tvcert::tvgrid
