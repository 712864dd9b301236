#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace tvcert::stability {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Closed polygonal sample of a curve, positively oriented.
///
/// Segment k joins point k to point (k+1) mod M. Normals point outward and
/// curvature is signed (positive on a convex, counter-clockwise curve).
class CurveSample {
public:
    /// Takes explicit geometry; throws InvalidArgument on inconsistent sizes,
    /// fewer than 3 points, non-unit normals, or non-positive segments.
    CurveSample(std::vector<Point2> points, std::vector<Point2> normals,
                std::vector<double> curvature);

    /// Uniform sample of the circle of radius R centered at the origin.
    static CurveSample circle(double radius, std::size_t m);
    /// Estimates normals and curvature (turning angle per unit length).
    static CurveSample from_points(std::vector<Point2> points);

    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point2>& points() const noexcept { return points_; }
    const std::vector<Point2>& normals() const noexcept { return normals_; }
    const std::vector<double>& curvature() const noexcept { return curvature_; }
    /// Length of segment k.
    const std::vector<double>& arclength() const noexcept { return arclength_; }
    /// Trapezoidal weight of node k: half of the two adjacent segments.
    double weight(std::size_t k) const;
    double length() const;
    /// sum_k H_k w_k; 2 pi for a simple positively oriented curve.
    double total_turning() const;

private:
    std::vector<Point2> points_;
    std::vector<Point2> normals_;
    std::vector<double> curvature_;
    std::vector<double> arclength_;
};

/// Scalar function sampled at the curve nodes.
struct FieldOnCurve {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }
};

/// First shape derivative: int (H - eta) psi dH^1.
double j1(const CurveSample& curve, const FieldOnCurve& eta, const FieldOnCurve& psi);

/// Second shape derivative: int |grad_tau psi|^2 - (H eta + d eta/d nu) psi^2 dH^1.
double j2(const CurveSample& curve, const FieldOnCurve& eta, const FieldOnCurve& deta_dnu,
          const FieldOnCurve& psi);

/// The same quadratic form with the zeroth-order coefficient c = H eta + d eta/d nu given directly.
double j2_potential(const CurveSample& curve, const FieldOnCurve& c, const FieldOnCurve& psi);

/// Discrete ||psi||^2_{H^1} = int psi^2 + |grad_tau psi|^2.
double h1_norm_sq(const CurveSample& curve, const FieldOnCurve& psi);

/// Centered arc-length difference quotient of psi at every node.
std::vector<double> tangential_gradient(const CurveSample& curve, const FieldOnCurve& psi);

struct ModeQuotient {
    int k = 0;
    double quotient = 0.0;
};

/// H^1-normalized Rayleigh quotients of cos(k theta), k = 0..k_max, for the
/// quadratic form with constant coefficient c on the circle of radius R:
/// (pi k^2/R - pi R c) / (pi R + pi k^2/R).
std::vector<ModeQuotient> circle_spectrum(double radius, double c, int k_max);

/// True when every quotient is positive.
bool is_coercive(const std::vector<ModeQuotient>& spectrum);

/// Contiguous run of `count` nodes starting at `first`, wrapping around.
struct IndexRange {
    std::size_t first = 0;
    std::size_t count = 0;
};

/// If alpha >= (pi / L)^2, with L the length of the arc spanned by `segment`,
/// returns the first Dirichlet eigenfunction sin(pi s / L) of the arc,
/// extended by zero; otherwise nothing. Throws InvalidSegment when the range
/// is not a proper arc of the curve or c_field < alpha somewhere on it.
std::optional<FieldOnCurve> noncoercivity_witness(const CurveSample& curve,
                                                  const FieldOnCurve& c_field, double alpha,
                                                  IndexRange segment);

/// Length of the arc spanned by `segment`.
double arc_length(const CurveSample& curve, IndexRange segment);

}  // namespace tvcert::stability
