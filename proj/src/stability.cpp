#include "tvcert/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tvcert/errors.hpp"

namespace tvcert::stability {
namespace {

double distance(Point2 a, Point2 b) { return std::hypot(b.x - a.x, b.y - a.y); }

void require_size(const CurveSample& curve, const FieldOnCurve& f, const char* name) {
    if (f.size() != curve.size())
        throw DimensionMismatch(std::string(name) + " has " + std::to_string(f.size()) +
                                " samples, curve has " + std::to_string(curve.size()));
}

}  // namespace

CurveSample::CurveSample(std::vector<Point2> points, std::vector<Point2> normals,
                         std::vector<double> curvature)
    : points_(std::move(points)), normals_(std::move(normals)), curvature_(std::move(curvature)) {
    const std::size_t m = points_.size();
    if (m < 3) throw InvalidArgument("curve needs at least 3 points");
    if (normals_.size() != m || curvature_.size() != m)
        throw InvalidArgument("curve: points, normals and curvature differ in length");
    arclength_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
        arclength_[k] = distance(points_[k], points_[(k + 1) % m]);
        if (!(arclength_[k] > 0.0)) throw InvalidArgument("curve: repeated consecutive points");
        if (std::abs(std::hypot(normals_[k].x, normals_[k].y) - 1.0) > 1e-10)
            throw InvalidArgument("curve: normals must have unit length");
    }
}

CurveSample CurveSample::circle(double radius, std::size_t m) {
    if (!(radius > 0.0)) throw InvalidArgument("circle radius must be positive");
    std::vector<Point2> pts(m), nrm(m);
    for (std::size_t k = 0; k < m; ++k) {
        const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        nrm[k] = {std::cos(th), std::sin(th)};
        pts[k] = {radius * nrm[k].x, radius * nrm[k].y};
    }
    return {std::move(pts), std::move(nrm), std::vector<double>(m, 1.0 / radius)};
}

CurveSample CurveSample::from_points(std::vector<Point2> points) {
    const std::size_t m = points.size();
    if (m < 3) throw InvalidArgument("curve needs at least 3 points");
    std::vector<Point2> nrm(m);
    std::vector<double> curv(m);
    for (std::size_t k = 0; k < m; ++k) {
        const Point2 prev = points[(k + m - 1) % m], cur = points[k], next = points[(k + 1) % m];
        const double tx = next.x - prev.x, ty = next.y - prev.y;
        const double tn = std::hypot(tx, ty);
        nrm[k] = {ty / tn, -tx / tn};
        const double a1 = std::atan2(cur.y - prev.y, cur.x - prev.x);
        const double a2 = std::atan2(next.y - cur.y, next.x - cur.x);
        double turn = a2 - a1;
        while (turn > std::numbers::pi) turn -= 2.0 * std::numbers::pi;
        while (turn < -std::numbers::pi) turn += 2.0 * std::numbers::pi;
        curv[k] = turn / (0.5 * (distance(prev, cur) + distance(cur, next)));
    }
    return {std::move(points), std::move(nrm), std::move(curv)};
}

double CurveSample::weight(std::size_t k) const {
    const std::size_t m = size();
    return 0.5 * (arclength_[(k + m - 1) % m] + arclength_[k]);
}

double CurveSample::length() const {
    double s = 0.0;
    for (double l : arclength_) s += l;
    return s;
}

double CurveSample::total_turning() const {
    double s = 0.0;
    for (std::size_t k = 0; k < size(); ++k) s += curvature_[k] * weight(k);
    return s;
}

std::vector<double> tangential_gradient(const CurveSample& curve, const FieldOnCurve& psi) {
    require_size(curve, psi, "psi");
    const std::size_t m = curve.size();
    const auto& ds = curve.arclength();
    std::vector<double> g(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t prev = (k + m - 1) % m, next = (k + 1) % m;
        g[k] = (psi[next] - psi[prev]) / (ds[prev] + ds[k]);
    }
    return g;
}

double j1(const CurveSample& curve, const FieldOnCurve& eta, const FieldOnCurve& psi) {
    require_size(curve, eta, "eta");
    require_size(curve, psi, "psi");
    double s = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k)
        s += (curve.curvature()[k] - eta[k]) * psi[k] * curve.weight(k);
    return s;
}

double j2_potential(const CurveSample& curve, const FieldOnCurve& c, const FieldOnCurve& psi) {
    require_size(curve, c, "c");
    const auto g = tangential_gradient(curve, psi);
    double s = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k)
        s += (g[k] * g[k] - c[k] * psi[k] * psi[k]) * curve.weight(k);
    return s;
}

double j2(const CurveSample& curve, const FieldOnCurve& eta, const FieldOnCurve& deta_dnu,
          const FieldOnCurve& psi) {
    require_size(curve, eta, "eta");
    require_size(curve, deta_dnu, "deta_dnu");
    FieldOnCurve c{std::vector<double>(curve.size())};
    for (std::size_t k = 0; k < curve.size(); ++k)
        c.values[k] = curve.curvature()[k] * eta[k] + deta_dnu[k];
    return j2_potential(curve, c, psi);
}

double h1_norm_sq(const CurveSample& curve, const FieldOnCurve& psi) {
    const auto g = tangential_gradient(curve, psi);
    double s = 0.0;
    for (std::size_t k = 0; k < curve.size(); ++k)
        s += (psi[k] * psi[k] + g[k] * g[k]) * curve.weight(k);
    return s;
}

std::vector<ModeQuotient> circle_spectrum(double radius, double c, int k_max) {
    if (!(radius > 0.0) || k_max < 0)
        throw InvalidArgument("circle_spectrum: need R > 0 and k_max >= 0");
    const double pi = std::numbers::pi;
    std::vector<ModeQuotient> out;
    out.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) {
        const double k2 = static_cast<double>(k) * k;
        out.push_back({k, (pi * k2 / radius - pi * radius * c) / (pi * radius + pi * k2 / radius)});
    }
    return out;
}

bool is_coercive(const std::vector<ModeQuotient>& spectrum) {
    return !spectrum.empty() && std::all_of(spectrum.begin(), spectrum.end(),
                                            [](const ModeQuotient& q) { return q.quotient > 0.0; });
}

double arc_length(const CurveSample& curve, IndexRange segment) {
    const std::size_t m = curve.size();
    if (segment.first >= m || segment.count < 3 || segment.count > m)
        throw InvalidSegment("segment must be a run of 3..M nodes starting inside the curve");
    double len = 0.0;
    for (std::size_t j = 0; j + 1 < segment.count; ++j)
        len += curve.arclength()[(segment.first + j) % m];
    return len;
}

std::optional<FieldOnCurve> noncoercivity_witness(const CurveSample& curve,
                                                  const FieldOnCurve& c_field, double alpha,
                                                  IndexRange segment) {
    require_size(curve, c_field, "c_field");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    const std::size_t m = curve.size();
    const double len = arc_length(curve, segment);
    for (std::size_t j = 0; j < segment.count; ++j)
        if (c_field[(segment.first + j) % m] < alpha)
            throw InvalidSegment("c_field drops below alpha on the segment");
    // First Dirichlet eigenvalue of the arc; the slack only absorbs rounding
    // in the summed segment lengths so that threshold equality counts.
    const double lambda1 = std::pow(std::numbers::pi / len, 2);
    if (alpha < lambda1 * (1.0 - 1e-12)) return std::nullopt;

    FieldOnCurve psi{std::vector<double>(m, 0.0)};
    double s = 0.0;
    for (std::size_t j = 0; j < segment.count; ++j) {
        const std::size_t k = (segment.first + j) % m;
        psi.values[k] = std::sin(std::numbers::pi * std::min(s, len) / len);
        s += curve.arclength()[k];
    }
    // Endpoints are exactly zero.
    psi.values[segment.first] = 0.0;
    psi.values[(segment.first + segment.count - 1) % m] = 0.0;
    return psi;
}

}  // namespace tvcert::stability
