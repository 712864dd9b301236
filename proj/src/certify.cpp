#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "tvcert/errors.hpp"
#include "tvcert/precertificate.hpp"
#include "tvcert/quadrature.hpp"

namespace tvcert::precert {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Nondegenerate: return "nondegenerate";
        case Verdict::FeasibleButUnstable: return "feasible_but_unstable";
        case Verdict::Infeasible: return "infeasible";
        case Verdict::SaturationFailed: return "saturation_failed";
    }
    return "unknown";
}

namespace {

std::vector<double> scan_grid(const SimpleRadialSpec& spec, double r_max, std::size_t points,
                              double exclusion) {
    std::vector<double> g;
    const double h = r_max / static_cast<double>(points - 1);
    g.reserve(points + 1000 * spec.size());
    for (std::size_t k = 0; k < points; ++k) g.push_back(h * static_cast<double>(k));
    g.back() = r_max;
    for (double R : spec.radii()) {
        g.push_back(R);
        g.push_back(R * (1.0 - exclusion));
        g.push_back(R * (1.0 + exclusion));
        // Local refinement around each radius, where f_v bends sharply.
        const double lo = std::max(0.0, R * (1.0 - 2.0 * exclusion));
        const double hi = std::min(r_max, R * (1.0 + 2.0 * exclusion));
        for (double r = lo; r < hi; r += 0.25 * h) g.push_back(r);
    }
    std::sort(g.begin(), g.end());
    std::vector<double> out;
    out.reserve(g.size());
    for (double r : g)
        if (out.empty() || r - out.back() > 1e-12 * std::max(1.0, r)) out.push_back(r);
    // Keep the exact radii and window edges even if a near-duplicate came first.
    for (double R : spec.radii())
        for (double r : {R, R * (1.0 - exclusion), R * (1.0 + exclusion)}) {
            auto it = std::lower_bound(out.begin(), out.end(), r - 1e-12 * std::max(1.0, r));
            if (it != out.end() && std::abs(*it - r) <= 1e-12 * std::max(1.0, r)) *it = r;
        }
    return out;
}

// Golden-section maximization of a unimodal function on [a, b].
template <class F>
std::pair<double, double> maximize(F&& f, double a, double b) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, b); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc > fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct ScanResult {
    double sup_outside = 0.0;
    double argmax_outside = 0.0;
    std::vector<double> window_max;
    double overshoot_bound = 0.0;
};

ScanResult scan(const FvEvaluator& fv, const SimpleRadialSpec& spec, double exclusion) {
    const auto& r = fv.knots();
    const std::size_t m = r.size();
    std::vector<double> a(m);
    for (std::size_t k = 0; k < m; ++k) a[k] = std::abs(fv.value_at_knot(k));

    // Window index of a knot, or -1 when outside all windows. Window edges count as outside.
    auto window_of = [&](double x) -> int {
        for (std::size_t i = 0; i < spec.size(); ++i)
            if (std::abs(x - spec.radius(i)) < exclusion * spec.radius(i)) return static_cast<int>(i);
        return -1;
    };
    std::vector<int> win(m);
    for (std::size_t k = 0; k < m; ++k) win[k] = window_of(r[k]);

    ScanResult res;
    res.window_max.assign(spec.size(), 0.0);
    auto abs_fv = [&](double x) { return std::abs(fv.value(x)); };
    for (std::size_t k = 0; k < m; ++k) {
        double best = a[k], where = r[k];
        const bool interior = k > 0 && k + 1 < m && win[k - 1] == win[k] && win[k + 1] == win[k];
        if (interior && a[k] >= a[k - 1] && a[k] >= a[k + 1] && a[k] > 0.0) {
            auto [x, v] = maximize(abs_fv, r[k - 1], r[k + 1]);
            if (v > best) {
                best = v;
                where = x;
            }
        }
        if (win[k] < 0) {
            if (best > res.sup_outside) {
                res.sup_outside = best;
                res.argmax_outside = where;
            }
            if (interior) {
                // Divided-difference curvature times h^2/8 bounds the overshoot
                // of |f_v| between samples.
                const double h1 = r[k] - r[k - 1], h2 = r[k + 1] - r[k];
                const double f0 = fv.value_at_knot(k - 1), f1 = fv.value_at_knot(k),
                             f2 = fv.value_at_knot(k + 1);
                const double second = 2.0 * ((f2 - f1) / h2 - (f1 - f0) / h1) / (h1 + h2);
                const double h = std::max(h1, h2);
                res.overshoot_bound = std::max(res.overshoot_bound, std::abs(second) * h * h / 8.0);
            }
        } else {
            auto& wm = res.window_max[static_cast<std::size_t>(win[k])];
            wm = std::max(wm, best);
        }
    }
    return res;
}

}  // namespace

CertificateReport certify(const SimpleRadialSpec& spec, const kernels::GaussianKernel& kernel,
                          const CertifyOptions& options) {
    if (!(options.exclusion > 0.0) || !(options.r_max_factor > 0.0) || options.min_grid < 16)
        throw InvalidArgument("certify: invalid options");
    const Precertificate pc = solve_precert(spec, kernel);
    const std::size_t n = spec.size();
    const double tau = pc.tau();

    CertificateReport rep;
    rep.sigma = pc.sigma();
    rep.tau = tau;
    rep.radii = spec.radii();
    rep.amplitudes = spec.amplitudes();
    rep.alpha.assign(pc.alpha().begin(), pc.alpha().end());
    rep.beta.assign(pc.beta().begin(), pc.beta().end());
    rep.gram_condition = pc.gram().condition;
    rep.constraint_residual = pc.constraint_residual();
    rep.ridge_applied = pc.ridge_applied();
    rep.total_moment = pc.total_moment();
    rep.scan_radius = spec.radii().back() + options.r_max_factor * tau;

    std::size_t points = options.min_grid;
    std::optional<FvEvaluator> fv;
    ScanResult sr;
    for (int attempt = 0;; ++attempt) {
        fv.emplace(pc, scan_grid(spec, rep.scan_radius, points, options.exclusion));
        sr = scan(*fv, spec, options.exclusion);
        const double margin = 1.0 - sr.sup_outside;
        if (margin <= 0.0 || sr.overshoot_bound <= 0.25 * margin) break;
        if (attempt >= options.max_refinements)
            throw GridTooCoarse("feasibility scan cannot resolve the maxima of |f_v| (overshoot bound " +
                                std::to_string(sr.overshoot_bound) + ", margin " +
                                std::to_string(margin) + ")");
        points *= 2;
    }
    rep.scan_points = fv->knots().size();

    const double f_end = fv->primitive().back();
    rep.tail_bound =
        (std::abs(rep.total_moment) + std::abs(f_end - rep.total_moment)) / rep.scan_radius;
    rep.sup_outside = sr.sup_outside;
    rep.argmax_outside = sr.argmax_outside;
    if (rep.tail_bound > rep.sup_outside) {
        rep.sup_outside = rep.tail_bound;
        rep.argmax_outside = rep.scan_radius;
    }
    rep.feasibility_margin = 1.0 - rep.sup_outside;
    rep.window_max = sr.window_max;

    const double h = 1e-3 * tau;
    for (std::size_t i = 0; i < n; ++i) {
        const double R = spec.radius(i), s = spec.sign(i);
        const double F = fv->primitive_at(R);
        const double f = F / R;
        const double eta = pc.eta(R), deta = pc.eta_dr(R);
        rep.saturation_residuals.push_back(std::abs(f - s));
        rep.eta_residuals.push_back(std::abs(eta - s / R));
        rep.derivative_residuals.push_back(std::abs(eta - f / R));

        auto local = [&](double a, double b) {
            auto integrand = [&](double x) { return pc.eta(x) * x; };
            return quad::integrate(integrand, a, b, 1e-17, 1e-15).value;
        };
        const double fp = (F + local(R, R + h)) / (R + h);
        const double fm = (F - local(R - h, R)) / (R - h);
        const double second = (fp - 2.0 * f + fm) / (h * h);
        rep.fv_second_numeric.push_back(second);
        rep.fv_second_closed.push_back(s / (R * R) + deta);
        rep.fv_second_printed.push_back(1.0 / (R * R) + deta);
        rep.second_derivative_mismatch.push_back(
            std::abs(second - rep.fv_second_closed.back()) >
            1e-4 * std::max(1.0, std::abs(rep.fv_second_closed.back())));
        rep.stability_margins.push_back(-(1.0 / (R * R) + s * deta));
    }

    const bool saturated = std::all_of(rep.saturation_residuals.begin(),
                                       rep.saturation_residuals.end(),
                                       [&](double v) { return v <= options.tol_sat; });
    const bool feasible = rep.feasibility_margin > 0.0;
    const bool windows_ok = std::all_of(rep.window_max.begin(), rep.window_max.end(),
                                        [&](double v) { return v <= 1.0 + options.tol_sat; });
    const bool stable = std::all_of(rep.stability_margins.begin(), rep.stability_margins.end(),
                                    [&](double v) { return v > options.tol_stab; });
    if (!saturated)
        rep.verdict = Verdict::SaturationFailed;
    else if (feasible && stable)
        rep.verdict = Verdict::Nondegenerate;
    else if (!feasible || !windows_ok)
        rep.verdict = Verdict::Infeasible;
    else
        rep.verdict = Verdict::FeasibleButUnstable;
    rep.minimal_norm_certificate =
        rep.verdict == Verdict::Nondegenerate || rep.verdict == Verdict::FeasibleButUnstable;
    return rep;
}

std::vector<SweepRow> sweep_sigma(const SimpleRadialSpec& spec, const std::vector<double>& sigmas,
                                  const CertifyOptions& options,
                                  kernels::SigmaConvention convention, unsigned jobs) {
    if (sigmas.empty()) throw InvalidArgument("sweep: empty sigma list");
    std::vector<SweepRow> rows(sigmas.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < sigmas.size(); k = next++) {
            rows[k].sigma = sigmas[k];
            try {
                rows[k].report = certify(spec, kernels::GaussianKernel(sigmas[k], convention), options);
            } catch (const std::exception& e) {
                rows[k].error = e.what();
            }
        }
    };
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(sigmas.size())));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    return rows;
}

}  // namespace tvcert::precert
