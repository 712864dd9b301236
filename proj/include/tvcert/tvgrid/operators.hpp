#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "tvcert/tvgrid/grid_image.hpp"

namespace tvcert::tvgrid {

/// Gaussian blur followed by stride-`factor` point sampling at the centers
/// of the coarse cells. The blur is separable, truncated at 4 sigma with the
/// taps renormalized to unit sum, and replicates edge pixels at the border.
class ForwardBlurSubsample {
public:
    /// `sigma_blur` is in the same length units as `pixel_size`.
    ForwardBlurSubsample(double sigma_blur, std::size_t factor, std::size_t obs_rows,
                         std::size_t obs_cols, double pixel_size = 1.0);

    double sigma_blur() const noexcept { return sigma_blur_; }
    std::size_t factor() const noexcept { return factor_; }
    std::size_t obs_rows() const noexcept { return obs_rows_; }
    std::size_t obs_cols() const noexcept { return obs_cols_; }
    std::size_t fine_rows() const noexcept { return obs_rows_ * factor_; }
    std::size_t fine_cols() const noexcept { return obs_cols_ * factor_; }
    double pixel_size() const noexcept { return pixel_size_; }
    const std::vector<double>& taps() const noexcept { return taps_; }

    GridImage forward(const GridImage& u) const;
    GridImage adjoint(const GridImage& y) const;

    /// Blank images with the operator's shapes.
    GridImage fine_image() const;
    GridImage observation_image() const;

    /// Fine row/column sampled by coarse index `coarse`.
    std::size_t sample_index(std::size_t coarse) const noexcept { return coarse * factor_ + factor_ / 2; }

private:
    double sigma_blur_;
    std::size_t factor_;
    std::size_t obs_rows_;
    std::size_t obs_cols_;
    double pixel_size_;
    std::vector<double> taps_;  // taps_[k + radius] for offsets -radius..radius
    std::ptrdiff_t radius_;
};

/// Discrete gradient field. The image is extended by zero outside the grid;
/// node (P, Q) for P in [0, rows], Q in [0, cols] carries the forward
/// differences between padded pixels (P, Q) -> (P+1, Q) and (P, Q) -> (P, Q+1),
/// padded pixel (P, Q) being image pixel (P-1, Q-1).
struct DualField {
    std::size_t rows = 0;  // image rows
    std::size_t cols = 0;  // image cols
    std::vector<double> zr;
    std::vector<double> zc;

    DualField() = default;
    DualField(std::size_t image_rows, std::size_t image_cols);
    std::size_t nodes() const noexcept { return zr.size(); }
    std::size_t node(std::size_t P, std::size_t Q) const noexcept { return P * (cols + 1) + Q; }
    /// Largest pointwise Euclidean norm.
    double max_norm() const;
};

DualField gradient(const GridImage& u);
void gradient_into(std::span<const double> u, DualField& g);
/// Negative adjoint of `gradient`; the result has the image shape.
GridImage divergence(const DualField& z, double pixel_size = 1.0);
void divergence_into(const DualField& z, std::span<double> out);
/// Isotropic discrete total variation: sum of pointwise gradient norms.
double total_variation(const GridImage& u);
double total_variation(std::span<const double> u, std::size_t rows, std::size_t cols);

/// Solves (D^T D) phi = f, D the zero-extension gradient above, by a
/// type-I sine transform. Instances are not safe for concurrent use.
class PoissonSolver {
public:
    PoissonSolver(std::size_t rows, std::size_t cols);
    ~PoissonSolver();
    PoissonSolver(const PoissonSolver&) = delete;
    PoissonSolver& operator=(const PoissonSolver&) = delete;

    void solve(std::span<const double> f, std::span<double> phi);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tvcert::tvgrid
