// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tvcert/precertificate.hpp"
#include "tvcert/radial_kernels.hpp"
#include "tvcert/stability.hpp"
#include "tvcert/tvgrid/level_structure.hpp"
#include "tvcert/tvgrid/operators.hpp"
#include "tvcert/tvgrid/phantom.hpp"
#include "tvcert/tvgrid/solver.hpp"

using namespace tvcert;
using precert::SimpleRadialSpec;
using precert::Verdict;
using kernels::GaussianKernel;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome kernel_oracles() {
    double worst = 0.0;
    for (double sigma : {0.1, 0.2, 0.5})
        for (double R : {0.5, 1.0, 1.5}) {
            const double tau = sigma * std::numbers::sqrt2, r_max = R + 6 * tau;
            for (int k = 0; k < 200; ++k) {
                const double r = r_max * k / 199.0;
                worst = std::max(worst, std::abs(kernels::disk_conv(tau, R, r) - oracle::disk_conv(tau, R, r)));
                worst = std::max(worst, std::abs(kernels::circle_conv(tau, R, r) - oracle::circle_conv(tau, R, r)));
            }
        }
    return {worst <= 1e-8, fmt("max abs error %.3g", worst)};
}

Outcome constraints() {
    struct Case {
        std::vector<double> radii, amps;
        double sigma;
    };
    std::vector<Case> cases{{{1.0}, {1.0}, 0.1},         {{1.0}, {1.0}, 0.2},           {{1.0}, {1.0}, 0.3},
                            {{1.0}, {1.0}, 0.5},         {{1.0}, {1.0}, 0.75},          {{1.0, 1.5}, {1.0, -1.0}, 0.2},
                            {{1.0, 1.4}, {1.0, -1.0}, 0.2}, {{1.0, 1.1}, {1.0, 1.0}, 0.2}, {{1.1}, {1.0}, 0.2},
                            {{0.5, 1.0, 2.0}, {2.0, -1.0, 1.0}, 0.25}};
    double worst = 0.0, slowest = 0.0;
    for (const auto& c : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto r = precert::certify(SimpleRadialSpec(c.radii, c.amps), GaussianKernel(c.sigma));
        slowest = std::max(slowest, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        for (double v : r.saturation_residuals) worst = std::max(worst, v);
        for (double v : r.eta_residuals) worst = std::max(worst, v);
    }
    return {worst <= 1e-6 && slowest < 1.0,
            fmt("%zu cases, max residual %.3g, slowest case %.2f s", cases.size(), worst, slowest)};
}

Outcome single_disk_sweep() {
    const auto rows = precert::sweep_sigma(SimpleRadialSpec({1.0}, {1.0}), {0.1, 0.2, 0.3, 0.5, 0.75});
    bool ok = true;
    std::ostringstream d;
    d << "f''(1):";
    for (const auto& row : rows) {
        if (!row.report) {
            d << " sigma=" << row.sigma << " error: " << row.error;
            ok = false;
            continue;
        }
        ok = ok && row.report->verdict == Verdict::Nondegenerate && row.report->fv_second_closed[0] < 0.0;
        d << ' ' << fmt("%.4g", row.report->fv_second_closed[0]) << '(' << to_string(row.report->verdict) << ')';
    }
    return {ok, d.str()};
}

Outcome opposite_signs() {
    const GaussianKernel h(0.2);
    const auto far = precert::certify(SimpleRadialSpec({1.0, 1.5}, {1.0, -1.0}), h);
    const auto near = precert::certify(SimpleRadialSpec({1.0, 1.4}, {1.0, -1.0}), h);
    return {far.verdict == Verdict::Nondegenerate && near.verdict != Verdict::Nondegenerate,
            "R2=1.5: " + to_string(far.verdict) + ", R2=1.4: " + to_string(near.verdict) +
                fmt(" (feasibility margin %.3g)", near.feasibility_margin)};
}

Outcome same_signs() {
    const GaussianKernel h(0.2);
    const auto pair = precert::certify(SimpleRadialSpec({1.0, 1.1}, {1.0, 1.0}), h);
    const auto one = precert::certify(SimpleRadialSpec({1.0}, {1.0}), h);
    const auto two = precert::certify(SimpleRadialSpec({1.1}, {1.0}), h);
    const auto& m = pair.stability_margins;
    const bool ok = pair.verdict == Verdict::Nondegenerate && m[0] > 0.0 && m[1] > 0.0 &&
                    m[0] < one.stability_margins[0] && m[1] < two.stability_margins[0];
    return {ok, fmt("margins %.4g, %.4g vs single %.4g, %.4g", m[0], m[1], one.stability_margins[0],
                    two.stability_margins[0])};
}

stability::FieldOnCurve constant(std::size_t m, double v) { return {std::vector<double>(m, v)}; }

Outcome j2_order() {
    const double R = 0.8, d = 1.7, c_const = 1 / (R * R) + d;
    double worst = INFINITY;
    for (int k : {0, 1, 2, 4}) {
        const double exact = k == 0 ? -2 * pi * R * c_const : pi * k * k / R - pi * R * c_const;
        std::vector<double> errs;
        for (std::size_t m : {256u, 512u, 1024u, 2048u}) {
            const auto c = stability::CurveSample::circle(R, m);
            stability::FieldOnCurve psi{std::vector<double>(m)};
            for (std::size_t j = 0; j < m; ++j)
                psi.values[j] = std::cos(k * std::atan2(c.points()[j].y, c.points()[j].x));
            errs.push_back(std::abs(stability::j2(c, constant(m, 1 / R), constant(m, d), psi) - exact));
        }
        // least-squares slope of log2 error against log2 M
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < errs.size(); ++i) {
            const double x = static_cast<double>(i), y = std::log2(errs[i]);
            sx += x, sy += y, sxx += x * x, sxy += x * y;
        }
        const double n = static_cast<double>(errs.size());
        worst = std::min(worst, -(n * sxy - sx * sy) / (n * sxx - sx * sx));
    }
    return {worst >= 1.9, fmt("minimum order over modes 0,1,2,4: %.3f", worst)};
}

Outcome witness() {
    const std::size_t m = 4096;
    const auto c = stability::CurveSample::circle(1.0, m);
    double worst = -INFINITY;
    int cases = 0;
    for (std::size_t count : {300u, 600u, 1200u, 3000u})
        for (double over : {1.0, 1.5, 4.0}) {
            const stability::IndexRange seg{4000, count};
            const double alpha = std::pow(pi / stability::arc_length(c, seg), 2) * over;
            const auto field = constant(m, alpha);
            const auto psi = stability::noncoercivity_witness(c, field, alpha, seg);
            if (!psi) return {false, fmt("no witness for %zu samples", count)};
            worst = std::max(worst, stability::j2_potential(c, field, *psi) / stability::h1_norm_sq(c, *psi));
            ++cases;
        }
    return {worst <= 1e-3, fmt("%d arcs, max j2/|psi|_H1^2 = %.3g", cases, worst)};
}

Outcome solver_certificate() {
    using namespace tvgrid;
    const ForwardBlurSubsample op(2.0, 4, 16, 16);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n;
    double adj = 0.0;
    for (int k = 0; k < 20; ++k) {
        GridImage u = op.fine_image(), y = op.observation_image();
        for (double& v : u.data()) v = n(rng);
        for (double& v : y.data()) v = n(rng);
        adj = std::max(adj, std::abs(dot(op.forward(u), y) - dot(u, op.adjoint(y))) /
                                std::sqrt(dot(u, u) * dot(y, y)));
    }
    const auto u0 = make_phantom(Phantom::disk(16.0), 64, 64, 1.0);
    const auto y = add_noise(op.forward(u0), 0.01, 1);
    const auto r = solve_tv(op, y, 0.01);
    return {r.normalized_gap() <= 1e-6 && r.iterations <= 20000 && adj <= 1e-10,
            fmt("gap %.3g after %zu iterations, adjoint error %.3g", r.normalized_gap(), r.iterations, adj)};
}

Outcome support_structure() {
    using namespace tvgrid;
    const ForwardBlurSubsample op(2.0, 5, 50, 50);
    const auto disk_u0 = make_phantom(Phantom::disk(10.0), 250, 250, 1.0);
    const auto disk = solve_tv(op, op.forward(disk_u0), 0.002);
    const auto ds = level_structure(disk.u, 0.25);
    const double amp_err = ds.component_count() ? std::abs(ds.components[0].median_amplitude - 1.0) : INFINITY;

    const auto shapes_u0 = make_phantom(Phantom::three_shapes(), 250, 250, 1.0);
    const auto shapes = solve_tv(op, add_noise(op.forward(shapes_u0), 0.01, 1), 0.01);
    const auto ss = level_structure(shapes.u, 0.25);
    int pos = 0, neg = 0;
    std::string pattern;
    for (const auto& comp : ss.components) {
        (comp.sign > 0 ? pos : neg)++;
        pattern += comp.sign > 0 ? '+' : '-';
    }
    const bool ok = ds.component_count() == 1 && amp_err <= 0.1 && ss.component_count() == 3 && pos == 2 && neg == 1;
    return {ok, fmt("disk: %zu component(s), amplitude error %.3f; three shapes: %zu components, signs by area %s",
                    ds.component_count(), amp_err, ss.component_count(), pattern.c_str())};
}

Outcome gnorm_cross_check() {
    using namespace tvgrid;
    const SimpleRadialSpec spec({1.0}, {1.0});
    const GaussianKernel kernel(0.2);
    const auto pc = precert::solve_precert(spec, kernel);
    const auto rep = precert::certify(spec, kernel);
    double sup = rep.sup_outside;
    for (double w : rep.window_max) sup = std::max(sup, w);
    const std::size_t n = 300;
    const double h = 6.0 / n;
    auto b = rasterize([&](double x, double y) { return pc.eta(std::hypot(x, y)); }, n, n, h);
    for (double& v : b.data()) v *= h;
    const auto g = discrete_gnorm_detailed(b);
    const double target = std::max(1.0, sup);
    return {std::abs(g.value - target) <= 0.1 * target,
            fmt("gnorm %.5f (lower bound %.5f), max(1, sup|f_v|) = %.5f", g.value, g.lower_bound, target)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "kernel oracle equivalence", 10, kernel_oracles},
        {2, "pre-certificate constraints", 30, constraints},
        {3, "single disk sigma sweep", 30, single_disk_sweep},
        {4, "opposite-sign pair separation", 5, opposite_signs},
        {5, "same-sign pair margins", 5, same_signs},
        {6, "shape Hessian convergence order", 10, j2_order},
        {7, "non-coercivity witness", 5, witness},
        {8, "solver self-certification", 60, solver_certificate},
        {9, "support structure on 250x250", 300, support_structure},
        {10, "radial/discrete dual norm cross-check", 120, gnorm_cross_check},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool pass = o.pass && s < c.limit_s;
        failed += !pass;
        std::printf("%s %2d %s: %s [%.2f s, limit %.0f s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    s, c.limit_s);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
