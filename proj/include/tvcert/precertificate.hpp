#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tvcert/radial_kernels.hpp"

namespace tvcert::precert {

/// u0 = sum_i a_i 1_{B(0, R_i)} with 0 < R_1 < ... < R_N and a_i != 0.
class SimpleRadialSpec {
public:
    /// Throws InvalidArgument on empty input, size mismatch, non-increasing
    /// or non-positive radii, or a zero amplitude.
    SimpleRadialSpec(std::vector<double> radii, std::vector<double> amplitudes);

    std::size_t size() const noexcept { return radii_.size(); }
    const std::vector<double>& radii() const noexcept { return radii_; }
    const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
    double radius(std::size_t i) const { return radii_.at(i); }
    double sign(std::size_t i) const { return amplitudes_.at(i) > 0.0 ? 1.0 : -1.0; }
    double perimeter(std::size_t i) const;
    double curvature(std::size_t i) const { return 1.0 / radii_.at(i); }

    /// Same radii, every amplitude negated.
    SimpleRadialSpec negated() const;

private:
    std::vector<double> radii_;
    std::vector<double> amplitudes_;
};

/// Gram matrix of the 2N functions {h*1_{E_i}} and {h*H^1|dE_i} (in that
/// order) together with the right-hand side of the least-norm problem.
struct GramSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
    double condition = 0.0;       ///< eigenvalue ratio of the symmetrized matrix
    double min_eigenvalue = 0.0;
    double asymmetry = 0.0;       ///< max |G - G^T| before symmetrization
};

/// Largest condition number accepted by assemble_gram.
inline constexpr double kMaxCondition = 1e14;

/// Throws ConditioningError when the condition estimate exceeds kMaxCondition.
GramSystem assemble_gram(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel);

/// The vanishing-derivatives pre-certificate eta_v = Phi^* p_v with
/// p_v = sum_i alpha_i h*1_{E_i} + beta_i h*(H^1|dE_i). Immutable.
class Precertificate {
public:
    Precertificate(SimpleRadialSpec spec, kernels::GaussianKernel kernel, GramSystem gram,
                   Eigen::VectorXd alpha, Eigen::VectorXd beta, bool ridge_applied);

    const SimpleRadialSpec& spec() const noexcept { return spec_; }
    const kernels::GaussianKernel& kernel() const noexcept { return kernel_; }
    double sigma() const noexcept { return kernel_.stddev(); }
    /// Width of h*h.
    double tau() const noexcept { return kernel_.doubled_stddev(); }
    const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
    const Eigen::VectorXd& beta() const noexcept { return beta_; }
    const GramSystem& gram() const noexcept { return gram_; }
    bool ridge_applied() const noexcept { return ridge_applied_; }

    /// ||G (alpha, beta) - rhs||_inf.
    double constraint_residual() const;

    double eta(double r) const;
    double eta_dr(double r) const;
    /// int_0^infty eta(s) s ds, in closed form from the kernel masses.
    double total_moment() const;

private:
    SimpleRadialSpec spec_;
    kernels::GaussianKernel kernel_;
    GramSystem gram_;
    Eigen::VectorXd alpha_;
    Eigen::VectorXd beta_;
    bool ridge_applied_;
};

/// Least-norm solve of the vanishing-derivatives system by Cholesky.
Precertificate solve_precert(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel);

double eval_eta(const Precertificate& pc, double r);
double eval_eta_dr(const Precertificate& pc, double r);

/// Evaluates f_v(r) = (1/r) int_0^r eta(s) s ds.
///
/// Keeps the cumulative integral on a set of knots so that values between
/// knots cost one short adaptive quadrature.
class FvEvaluator {
public:
    /// `knots` must be strictly increasing and start at 0.
    FvEvaluator(const Precertificate& pc, std::vector<double> knots);

    const std::vector<double>& knots() const noexcept { return knots_; }
    /// F(r_k) = int_0^{r_k} eta(s) s ds at each knot.
    const std::vector<double>& primitive() const noexcept { return primitive_; }

    /// int_0^r eta(s) s ds for any r >= 0.
    double primitive_at(double r) const;
    double value(double r) const;
    double value_at_knot(std::size_t k) const;
    /// f_v'(r) = eta(r) - f_v(r) / r.
    double derivative(double r) const;

private:
    const Precertificate* pc_;
    std::vector<double> knots_;
    std::vector<double> correction_;  // int_0^{r_k} (s^2/2) eta'(s) ds
    std::vector<double> primitive_;
};

/// f_v sampled on `r_grid` (strictly increasing, starting at 0).
kernels::RadialProfile eval_fv(const Precertificate& pc, const std::vector<double>& r_grid);

/// eta_v sampled on `r_grid`.
kernels::RadialProfile eval_eta_profile(const Precertificate& pc, const std::vector<double>& r_grid);

enum class Verdict { Nondegenerate, FeasibleButUnstable, Infeasible, SaturationFailed };

std::string to_string(Verdict v);

struct CertifyOptions {
    double tol_sat = 1e-6;
    double tol_stab = 1e-10;
    double exclusion = 0.02;     ///< window half-width, relative to R_i
    double r_max_factor = 6.0;   ///< scan up to R_N + r_max_factor * tau
    std::size_t min_grid = 4000;
    int max_refinements = 3;
};

struct CertificateReport {
    double sigma = 0.0;
    double tau = 0.0;
    std::vector<double> radii;
    std::vector<double> amplitudes;
    std::vector<double> alpha;
    std::vector<double> beta;
    double gram_condition = 0.0;
    double constraint_residual = 0.0;
    bool ridge_applied = false;

    std::vector<double> saturation_residuals;  ///< |f_v(R_i) - sign(a_i)|
    std::vector<double> eta_residuals;         ///< |eta_v(R_i) - sign(a_i)/R_i|
    std::vector<double> derivative_residuals;  ///< |f_v'(R_i)|
    double feasibility_margin = 0.0;           ///< 1 - sup |f_v| outside the windows
    double sup_outside = 0.0;
    double argmax_outside = 0.0;
    std::vector<double> window_max;            ///< max |f_v| inside each window
    double tail_bound = 0.0;                   ///< bound on |f_v| beyond the scan
    double total_moment = 0.0;
    double scan_radius = 0.0;
    std::size_t scan_points = 0;

    /// -(1/R_i^2 + sign(a_i) eta_v'(R_i)); positive means strictly stable.
    std::vector<double> stability_margins;
    std::vector<double> fv_second_numeric;
    std::vector<double> fv_second_closed;   ///< sign(a_i)/R_i^2 + eta_v'(R_i)
    std::vector<double> fv_second_printed;  ///< 1/R_i^2 + eta_v'(R_i)
    std::vector<bool> second_derivative_mismatch;

    Verdict verdict = Verdict::SaturationFailed;
    /// eta_v coincides with the minimal-norm certificate only when it is
    /// dual feasible, i.e. when the verdict is at least FeasibleButUnstable.
    bool minimal_norm_certificate = false;
};

/// Decides the non-degenerate source condition for `spec` under blur `kernel`.
/// Throws ConditioningError or GridTooCoarse.
CertificateReport certify(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel,
                          const CertifyOptions& options = {});

struct SweepRow {
    double sigma = 0.0;
    std::optional<CertificateReport> report;
    std::string error;
};

/// One independent certify() per kernel width; failures are recorded per row.
/// Rows are computed on up to `jobs` threads and returned in input order.
std::vector<SweepRow> sweep_sigma(const SimpleRadialSpec& spec, const std::vector<double>& sigmas,
                                  const CertifyOptions& options = {},
                                  kernels::SigmaConvention convention =
                                      kernels::SigmaConvention::StandardDeviation,
                                  unsigned jobs = 1);

}  // namespace tvcert::precert
