#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tvcert/errors.hpp"
#include "tvcert/tvgrid/grid_image.hpp"
#include "tvcert/tvgrid/operators.hpp"

namespace tvcert::tvgrid {

struct SolveParams {
    std::size_t max_iter = 20000;
    double gap_tol = 1e-6;
    std::size_t check_every = 50;
    std::size_t power_iterations = 60;
    /// Step sizes are rebalanced at each gap check up to this iteration.
    std::size_t step_adapt_iterations = 1000;
};

struct IterationRecord {
    std::size_t iteration;
    double primal;          // current iterate
    double averaged_primal; // plain running average of all iterates so far
    double dual;
    double normalized_gap;
};

struct SolveResult {
    GridImage u;
    /// Observation-shaped p with Phi u = y - lambda p; Phi* p is the certificate.
    GridImage dual_p;
    double primal_value = 0.0;
    double dual_value = 0.0;
    double gap = 0.0;
    std::size_t iterations = 0;
    double lambda = 0.0;
    double operator_norm = 0.0;
    std::vector<IterationRecord> history;

    double normalized_gap() const { return gap / (1.0 + std::abs(primal_value)); }
};

/// An iterative method stopped at its iteration cap. For solve_tv the last
/// iterate is attached.
class NotConverged : public Error {
public:
    NotConverged(const std::string& what, double gap, std::size_t iterations,
                 std::optional<SolveResult> result = std::nullopt)
        : Error(what), gap_(gap), iterations_(iterations), result_(std::move(result)) {}
    double gap() const noexcept { return gap_; }
    std::size_t iterations() const noexcept { return iterations_; }
    const std::optional<SolveResult>& result() const noexcept { return result_; }

private:
    double gap_;
    std::size_t iterations_;
    std::optional<SolveResult> result_;
};

/// min_u 1/2 |Phi u - y|^2 + lambda TV(u) by a primal-dual iteration with a
/// duality-gap stopping rule. Throws NotConverged after max_iter iterations.
SolveResult solve_tv(const ForwardBlurSubsample& op, const GridImage& y, double lambda,
                     const SolveParams& params = {});

struct GnormParams {
    std::size_t max_iter = 20000;
    /// Relative gap between the certified upper and lower bounds.
    double tol = 1e-3;
    std::size_t check_every = 25;
};

struct GnormResult {
    double value = 0.0;        // certified upper bound, returned by discrete_gnorm
    double lower_bound = 0.0;
    std::size_t iterations = 0;
    double divergence_residual = 0.0;
};

/// sup { <eta, u> : TV(u) <= 1 } over grid images, computed as
/// min { max_k |z_k| : div z = eta }. `eta` enters as plain pixel values;
/// callers discretizing a continuous field scale by the pixel size first
/// (see discrete_gnorm_of_field).
GnormResult discrete_gnorm_detailed(const GridImage& eta, const GnormParams& params = {});
double discrete_gnorm(const GridImage& eta, const GnormParams& params = {});
/// G-norm of a sampled continuous field: pixel values times pixel_size.
double discrete_gnorm_of_field(const GridImage& eta, const GnormParams& params = {});

/// Smallest lambda for which the zero image solves the problem for data y.
double lambda_max(const ForwardBlurSubsample& op, const GridImage& y,
                  const GnormParams& params = {});

}  // namespace tvcert::tvgrid
