#include "tvcert/tvgrid/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "tvcert/errors.hpp"

namespace tvcert::tvgrid {

ForwardBlurSubsample::ForwardBlurSubsample(double sigma_blur, std::size_t factor,
                                           std::size_t obs_rows, std::size_t obs_cols,
                                           double pixel_size)
    : sigma_blur_(sigma_blur),
      factor_(factor),
      obs_rows_(obs_rows),
      obs_cols_(obs_cols),
      pixel_size_(pixel_size) {
    if (!(sigma_blur > 0.0) || !std::isfinite(sigma_blur))
        throw InvalidArgument("sigma_blur must be positive");
    if (factor == 0 || obs_rows == 0 || obs_cols == 0)
        throw InvalidDims("factor and observation dims must be positive");
    if (!(pixel_size > 0.0)) throw InvalidDims("pixel_size must be positive");
    const double s = sigma_blur / pixel_size;
    radius_ = static_cast<std::ptrdiff_t>(std::ceil(4.0 * s));
    taps_.resize(static_cast<std::size_t>(2 * radius_ + 1));
    double total = 0.0;
    for (std::ptrdiff_t k = -radius_; k <= radius_; ++k) {
        const double w = std::exp(-0.5 * static_cast<double>(k * k) / (s * s));
        taps_[static_cast<std::size_t>(k + radius_)] = w;
        total += w;
    }
    for (double& w : taps_) w /= total;
}

GridImage ForwardBlurSubsample::fine_image() const {
    return {fine_rows(), fine_cols(), pixel_size_};
}

GridImage ForwardBlurSubsample::observation_image() const {
    return {obs_rows_, obs_cols_, pixel_size_ * static_cast<double>(factor_)};
}

namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
    if (i < 0) return 0;
    if (i >= static_cast<std::ptrdiff_t>(n)) return n - 1;
    return static_cast<std::size_t>(i);
}

}  // namespace

GridImage ForwardBlurSubsample::forward(const GridImage& u) const {
    if (u.rows() != fine_rows() || u.cols() != fine_cols())
        throw DimensionMismatch("forward: image is " + std::to_string(u.rows()) + "x" +
                                std::to_string(u.cols()) + ", operator expects " +
                                std::to_string(fine_rows()) + "x" +
                                std::to_string(fine_cols()));
    const std::size_t nc = fine_cols();
    std::vector<double> tmp(obs_rows_ * nc, 0.0);
    for (std::size_t I = 0; I < obs_rows_; ++I) {
        const auto a = static_cast<std::ptrdiff_t>(sample_index(I));
        double* row = &tmp[I * nc];
        for (std::ptrdiff_t k = -radius_; k <= radius_; ++k) {
            const double w = taps_[static_cast<std::size_t>(k + radius_)];
            const std::size_t src = clamp_index(a + k, fine_rows());
            for (std::size_t j = 0; j < nc; ++j) row[j] += w * u(src, j);
        }
    }
    GridImage y = observation_image();
    for (std::size_t I = 0; I < obs_rows_; ++I)
        for (std::size_t J = 0; J < obs_cols_; ++J) {
            const auto b = static_cast<std::ptrdiff_t>(sample_index(J));
            double acc = 0.0;
            for (std::ptrdiff_t k = -radius_; k <= radius_; ++k)
                acc += taps_[static_cast<std::size_t>(k + radius_)] *
                       tmp[I * nc + clamp_index(b + k, nc)];
            y(I, J) = acc;
        }
    return y;
}

GridImage ForwardBlurSubsample::adjoint(const GridImage& y) const {
    if (y.rows() != obs_rows_ || y.cols() != obs_cols_)
        throw DimensionMismatch("adjoint: observation is " + std::to_string(y.rows()) + "x" +
                                std::to_string(y.cols()) + ", operator expects " +
                                std::to_string(obs_rows_) + "x" + std::to_string(obs_cols_));
    const std::size_t nc = fine_cols();
    std::vector<double> tmp(obs_rows_ * nc, 0.0);
    for (std::size_t I = 0; I < obs_rows_; ++I)
        for (std::size_t J = 0; J < obs_cols_; ++J) {
            const auto b = static_cast<std::ptrdiff_t>(sample_index(J));
            const double v = y(I, J);
            for (std::ptrdiff_t k = -radius_; k <= radius_; ++k)
                tmp[I * nc + clamp_index(b + k, nc)] +=
                    taps_[static_cast<std::size_t>(k + radius_)] * v;
        }
    GridImage u = fine_image();
    for (std::size_t I = 0; I < obs_rows_; ++I) {
        const auto a = static_cast<std::ptrdiff_t>(sample_index(I));
        const double* row = &tmp[I * nc];
        for (std::ptrdiff_t k = -radius_; k <= radius_; ++k) {
            const double w = taps_[static_cast<std::size_t>(k + radius_)];
            const std::size_t dst = clamp_index(a + k, fine_rows());
            for (std::size_t j = 0; j < nc; ++j) u(dst, j) += w * row[j];
        }
    }
    return u;
}

DualField::DualField(std::size_t image_rows, std::size_t image_cols)
    : rows(image_rows),
      cols(image_cols),
      zr((image_rows + 1) * (image_cols + 1), 0.0),
      zc((image_rows + 1) * (image_cols + 1), 0.0) {}

double DualField::max_norm() const {
    double m = 0.0;
    for (std::size_t k = 0; k < zr.size(); ++k) m = std::max(m, std::hypot(zr[k], zc[k]));
    return m;
}

void gradient_into(std::span<const double> u, DualField& g) {
    const std::size_t n = g.rows, m = g.cols, w = m + 1;
    // node row P = 0 sits above the image: only the downward difference
    g.zr[0] = g.zc[0] = 0.0;
    for (std::size_t Q = 1; Q <= m; ++Q) {
        g.zr[Q] = u[Q - 1];
        g.zc[Q] = 0.0;
    }
    for (std::size_t P = 1; P <= n; ++P) {
        const double* row = &u[(P - 1) * m];
        const double* below = P < n ? &u[P * m] : nullptr;
        double* zr = &g.zr[P * w];
        double* zc = &g.zc[P * w];
        zr[0] = 0.0;
        zc[0] = row[0];
        for (std::size_t Q = 1; Q <= m; ++Q) {
            const double c = row[Q - 1];
            zr[Q] = (below ? below[Q - 1] : 0.0) - c;
            zc[Q] = (Q < m ? row[Q] : 0.0) - c;
        }
    }
}

DualField gradient(const GridImage& u) {
    DualField g(u.rows(), u.cols());
    gradient_into(u.data(), g);
    return g;
}

void divergence_into(const DualField& z, std::span<double> out) {
    const std::size_t n = z.rows, m = z.cols, w = m + 1;
    for (std::size_t P = 1; P <= n; ++P) {
        const double* zr = &z.zr[P * w];
        const double* zr_up = &z.zr[(P - 1) * w];
        const double* zc = &z.zc[P * w];
        double* o = &out[(P - 1) * m];
        for (std::size_t Q = 1; Q <= m; ++Q)
            o[Q - 1] = zr[Q] - zr_up[Q] + zc[Q] - zc[Q - 1];
    }
}

GridImage divergence(const DualField& z, double pixel_size) {
    GridImage out(z.rows, z.cols, pixel_size);
    divergence_into(z, out.data());
    return out;
}

double total_variation(std::span<const double> u, std::size_t rows, std::size_t cols) {
    // Same stencil as gradient_into, accumulated without storing the field.
    const std::size_t n = rows, m = cols;
    double tv = 0.0;
    for (std::size_t Q = 0; Q < m; ++Q) tv += std::abs(u[Q]);
    for (std::size_t P = 0; P < n; ++P) {
        const double* row = &u[P * m];
        const double* below = P + 1 < n ? &u[(P + 1) * m] : nullptr;
        tv += std::abs(row[0]);
        for (std::size_t Q = 0; Q < m; ++Q) {
            const double c = row[Q];
            const double dr = (below ? below[Q] : 0.0) - c;
            const double dc = (Q + 1 < m ? row[Q + 1] : 0.0) - c;
            tv += std::sqrt(dr * dr + dc * dc);
        }
    }
    return tv;
}

double total_variation(const GridImage& u) {
    return total_variation(u.data(), u.rows(), u.cols());
}

namespace {
// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct PoissonSolver::Impl {
    std::size_t rows, cols;
    double* buffer = nullptr;
    fftw_plan plan = nullptr;
    std::vector<double> inv_eig;
};

PoissonSolver::PoissonSolver(std::size_t rows, std::size_t cols) : impl_(new Impl{rows, cols, nullptr, nullptr, {}}) {
    if (rows == 0 || cols == 0) throw InvalidDims("Poisson solver needs positive dims");
    impl_->buffer = fftw_alloc_real(rows * cols);
    {
        std::lock_guard lock(planner_mutex());
        impl_->plan = fftw_plan_r2r_2d(static_cast<int>(rows), static_cast<int>(cols),
                                       impl_->buffer, impl_->buffer, FFTW_RODFT00,
                                       FFTW_RODFT00, FFTW_ESTIMATE);
    }
    const double norm = 4.0 * static_cast<double>(rows + 1) * static_cast<double>(cols + 1);
    impl_->inv_eig.resize(rows * cols);
    for (std::size_t k = 0; k < rows; ++k) {
        const double sk = std::sin(std::numbers::pi * static_cast<double>(k + 1) /
                                   (2.0 * static_cast<double>(rows + 1)));
        for (std::size_t l = 0; l < cols; ++l) {
            const double sl = std::sin(std::numbers::pi * static_cast<double>(l + 1) /
                                       (2.0 * static_cast<double>(cols + 1)));
            impl_->inv_eig[k * cols + l] = 1.0 / (norm * 4.0 * (sk * sk + sl * sl));
        }
    }
}

PoissonSolver::~PoissonSolver() {
    if (!impl_) return;
    std::lock_guard lock(planner_mutex());
    if (impl_->plan) fftw_destroy_plan(impl_->plan);
    if (impl_->buffer) fftw_free(impl_->buffer);
}

void PoissonSolver::solve(std::span<const double> f, std::span<double> phi) {
    const std::size_t n = impl_->rows * impl_->cols;
    if (f.size() != n || phi.size() != n) throw DimensionMismatch("Poisson solve: size mismatch");
    std::copy(f.begin(), f.end(), impl_->buffer);
    fftw_execute(impl_->plan);
    for (std::size_t k = 0; k < n; ++k) impl_->buffer[k] *= impl_->inv_eig[k];
    fftw_execute(impl_->plan);
    std::copy(impl_->buffer, impl_->buffer + n, phi.begin());
}

}  // namespace tvcert::tvgrid
