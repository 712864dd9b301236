#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tvcert::tvgrid {

/// Image on a regular grid, row-major. `pixel_size` is the side length of a
/// pixel in the same length units as the blur width.
class GridImage {
public:
    GridImage() = default;
    /// Zero image. Throws InvalidDims unless rows, cols > 0 and pixel_size > 0.
    GridImage(std::size_t rows, std::size_t cols, double pixel_size = 1.0);
    /// Throws InvalidDims on a size mismatch and InvalidArgument on non-finite data.
    GridImage(std::size_t rows, std::size_t cols, double pixel_size, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    double pixel_size() const noexcept { return pixel_size_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    /// Physical coordinates of the center of pixel (i, j); the grid is
    /// centered on the origin, x along columns, y along rows.
    double x_center(std::size_t j) const;
    double y_center(std::size_t i) const;

    double max_abs() const;
    bool same_shape(const GridImage& other) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    double pixel_size_ = 1.0;
    std::vector<double> data_;
};

/// Plain (unweighted) sum of pixelwise products.
double dot(const GridImage& a, const GridImage& b);

/// Writes "P_GRID rows cols pixel_size\n" followed by rows*cols
/// little-endian IEEE-754 binary64 values in row-major order.
void write_grid(std::ostream& out, const GridImage& img);
void write_grid(const std::string& path, const GridImage& img);
/// Throws InvalidArgument on a malformed header or truncated payload.
GridImage read_grid(std::istream& in);
GridImage read_grid(const std::string& path);

}  // namespace tvcert::tvgrid
