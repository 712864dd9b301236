#include "tvcert/precertificate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

#include "tvcert/errors.hpp"
#include "tvcert/quadrature.hpp"

namespace tvcert::precert {

using kernels::circle_conv;
using kernels::circle_conv_dr;
using kernels::disk_conv;
using kernels::disk_conv_dr;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SimpleRadialSpec::SimpleRadialSpec(std::vector<double> radii, std::vector<double> amplitudes)
    : radii_(std::move(radii)), amplitudes_(std::move(amplitudes)) {
    if (radii_.empty()) throw InvalidArgument("spec: at least one radius is required");
    if (radii_.size() != amplitudes_.size())
        throw InvalidArgument("spec: radii and amplitudes differ in length");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
        if (!(radii_[i] > 0.0) || !std::isfinite(radii_[i]))
            throw InvalidArgument("spec: radii must be positive and finite");
        if (i > 0 && !(radii_[i] > radii_[i - 1]))
            throw InvalidArgument("spec: radii must be strictly increasing");
        if (amplitudes_[i] == 0.0 || !std::isfinite(amplitudes_[i]))
            throw InvalidArgument("spec: amplitudes must be nonzero and finite");
    }
}

double SimpleRadialSpec::perimeter(std::size_t i) const { return kTwoPi * radii_.at(i); }

SimpleRadialSpec SimpleRadialSpec::negated() const {
    auto amps = amplitudes_;
    for (double& a : amps) a = -a;
    return {radii_, std::move(amps)};
}

namespace {

// <h*1_{B(R_i)}, h*1_{B(R_j)}> = 2 pi int_0^{R_j} (g_tau * 1_{B(R_i)})(r) r dr.
double disk_disk_product(double tau, double Ri, double Rj) {
    auto integrand = [&](double r) { return disk_conv(tau, Ri, r) * r; };
    const std::array<double, 3> breaks{Ri - 6.0 * tau, Ri, Ri + 6.0 * tau};
    return kTwoPi * quad::integrate(integrand, 0.0, Rj, 1e-13, 1e-14, breaks).value;
}

}  // namespace

GramSystem assemble_gram(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel) {
    const std::size_t n = spec.size();
    const double tau = kernel.doubled_stddev();
    Eigen::MatrixXd g(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        const double Ri = spec.radius(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double Rj = spec.radius(j);
            g(i, j) = disk_disk_product(tau, Ri, Rj);
            g(i, n + j) = kTwoPi * Rj * disk_conv(tau, Ri, Rj);
            g(n + j, i) = g(i, n + j);
            g(n + i, n + j) = kTwoPi * Rj * circle_conv(tau, Ri, Rj);
        }
    }
    GramSystem sys;
    sys.asymmetry = (g - g.transpose()).cwiseAbs().maxCoeff();
    sys.matrix = 0.5 * (g + g.transpose());
    sys.rhs.resize(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        sys.rhs(i) = spec.sign(i) * spec.perimeter(i);
        sys.rhs(n + i) = spec.sign(i) * kTwoPi;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sys.matrix, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    sys.min_eigenvalue = ev.minCoeff();
    sys.condition = sys.min_eigenvalue > 0.0 ? ev.maxCoeff() / sys.min_eigenvalue
                                             : std::numeric_limits<double>::infinity();
    if (!(sys.condition <= kMaxCondition))
        throw ConditioningError("Gram matrix condition number " + std::to_string(sys.condition) +
                                    " exceeds limit; radii too close for this kernel width",
                                sys.condition);
    return sys;
}

Precertificate::Precertificate(SimpleRadialSpec spec, kernels::GaussianKernel kernel,
                               GramSystem gram, Eigen::VectorXd alpha, Eigen::VectorXd beta,
                               bool ridge_applied)
    : spec_(std::move(spec)),
      kernel_(kernel),
      gram_(std::move(gram)),
      alpha_(std::move(alpha)),
      beta_(std::move(beta)),
      ridge_applied_(ridge_applied) {}

double Precertificate::constraint_residual() const {
    Eigen::VectorXd x(2 * spec_.size());
    x << alpha_, beta_;
    return (gram_.matrix * x - gram_.rhs).cwiseAbs().maxCoeff();
}

double Precertificate::eta(double r) const {
    const double t = tau();
    double v = 0.0;
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        const double R = spec_.radius(i);
        v += alpha_(i) * disk_conv(t, R, r) + beta_(i) * circle_conv(t, R, r);
    }
    return v;
}

double Precertificate::eta_dr(double r) const {
    const double t = tau();
    double v = 0.0;
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        const double R = spec_.radius(i);
        v += alpha_(i) * disk_conv_dr(t, R, r) + beta_(i) * circle_conv_dr(t, R, r);
    }
    return v;
}

double Precertificate::total_moment() const {
    // int_0^inf (g*1_B)(s) s ds = R^2/2 and int_0^inf (g*H^1|dB)(s) s ds = R.
    double m = 0.0;
    for (std::size_t i = 0; i < spec_.size(); ++i) {
        const double R = spec_.radius(i);
        m += alpha_(i) * 0.5 * R * R + beta_(i) * R;
    }
    return m;
}

Precertificate solve_precert(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel) {
    GramSystem sys = assemble_gram(spec, kernel);
    const std::size_t n = spec.size();
    Eigen::MatrixXd matrix = sys.matrix;
    bool ridge = false;
    Eigen::LLT<Eigen::MatrixXd> llt(matrix);
    if (llt.info() != Eigen::Success) {
        const double shift = 1e-12 * matrix.trace() / static_cast<double>(2 * n);
        matrix.diagonal().array() += shift;
        llt.compute(matrix);
        if (llt.info() != Eigen::Success)
            throw ConditioningError("Gram factorization failed after ridge shift", sys.condition);
        std::clog << "warning: Gram factorization needed a ridge shift of " << shift << '\n';
        ridge = true;
    }
    Eigen::VectorXd x = llt.solve(sys.rhs);
    // One step of iterative refinement against the unshifted system.
    x += llt.solve(sys.rhs - sys.matrix * x);
    Eigen::VectorXd alpha = x.head(n);
    Eigen::VectorXd beta = x.tail(n);
    return {spec, kernel, std::move(sys), std::move(alpha), std::move(beta), ridge};
}

double eval_eta(const Precertificate& pc, double r) { return pc.eta(r); }
double eval_eta_dr(const Precertificate& pc, double r) { return pc.eta_dr(r); }

namespace {

// int_a^b (s^2/2) eta'(s) ds; the integrand is closed form.
double moment_of_derivative(const Precertificate& pc, double a, double b) {
    auto integrand = [&](double s) { return 0.5 * s * s * pc.eta_dr(s); };
    return quad::integrate(integrand, a, b, 1e-15 * std::max(1.0, b), 1e-14).value;
}

}  // namespace

// Integration by parts turns the primitive into
//   F(r) = int_0^r eta(s) s ds = (r^2/2) eta(r) - int_0^r (s^2/2) eta'(s) ds,
// so the cumulative quadrature only touches the closed-form derivative.
FvEvaluator::FvEvaluator(const Precertificate& pc, std::vector<double> knots)
    : pc_(&pc), knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front() != 0.0)
        throw InvalidArgument("f_v grid must start at 0");
    for (std::size_t k = 1; k < knots_.size(); ++k)
        if (!(knots_[k] > knots_[k - 1]))
            throw InvalidArgument("f_v grid must be strictly increasing");
    const std::size_t m = knots_.size();
    correction_.assign(m, 0.0);
    primitive_.assign(m, 0.0);
    for (std::size_t k = 1; k < m; ++k) {
        correction_[k] = correction_[k - 1] + moment_of_derivative(pc, knots_[k - 1], knots_[k]);
        const double r = knots_[k];
        primitive_[k] = 0.5 * r * r * pc.eta(r) - correction_[k];
    }
}

double FvEvaluator::primitive_at(double r) const {
    if (!(r >= 0.0)) throw InvalidArgument("f_v: negative radius");
    auto it = std::upper_bound(knots_.begin(), knots_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (knots_[k] == r) return primitive_[k];
    const double corr = correction_[k] + moment_of_derivative(*pc_, knots_[k], r);
    return 0.5 * r * r * pc_->eta(r) - corr;
}

double FvEvaluator::value(double r) const { return r == 0.0 ? 0.0 : primitive_at(r) / r; }

double FvEvaluator::value_at_knot(std::size_t k) const {
    return knots_.at(k) == 0.0 ? 0.0 : primitive_[k] / knots_[k];
}

double FvEvaluator::derivative(double r) const {
    if (r == 0.0) return 0.5 * pc_->eta(0.0);
    return pc_->eta(r) - value(r) / r;
}

kernels::RadialProfile eval_fv(const Precertificate& pc, const std::vector<double>& r_grid) {
    FvEvaluator fv(pc, r_grid);
    kernels::RadialProfile out{r_grid, {}, "f_v"};
    out.values.reserve(r_grid.size());
    for (std::size_t k = 0; k < r_grid.size(); ++k) out.values.push_back(fv.value_at_knot(k));
    return out;
}

kernels::RadialProfile eval_eta_profile(const Precertificate& pc,
                                        const std::vector<double>& r_grid) {
    kernels::RadialProfile out{r_grid, {}, "eta_v"};
    out.values.reserve(r_grid.size());
    for (double r : r_grid) out.values.push_back(pc.eta(r));
    out.validate();
    return out;
}

}  // namespace tvcert::precert
