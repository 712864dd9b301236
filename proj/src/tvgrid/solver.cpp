#include "tvcert/tvgrid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tvcert::tvgrid {

namespace {

double sq_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double inner(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

/// Largest eigenvalue of Phi* Phi + D^T D by power iteration, with a small
/// safety factor since the iteration approaches it from below.
double composite_norm_sq(const ForwardBlurSubsample& op, std::size_t iterations) {
    GridImage v = op.fine_image();
    std::mt19937_64 rng(0x5eed);
    std::normal_distribution<double> normal;
    for (double& x : v.data()) x = normal(rng);
    DualField g(v.rows(), v.cols());
    std::vector<double> d(v.size());
    double estimate = 0.0;
    for (std::size_t it = 0; it < iterations; ++it) {
        const double nv = std::sqrt(sq_norm(v.data()));
        for (double& x : v.data()) x /= nv;
        GridImage w = op.adjoint(op.forward(v));
        gradient_into(v.data(), g);
        divergence_into(g, d);
        for (std::size_t k = 0; k < w.size(); ++k) w.data()[k] -= d[k];
        estimate = inner(v.data(), w.data());
        v = std::move(w);
    }
    return 1.05 * estimate;
}

struct Evaluator {
    const ForwardBlurSubsample& op;
    const GridImage& y;
    double lambda;
    PoissonSolver poisson;
    DualField scratch_field;
    std::vector<double> rhs, phi;

    Evaluator(const ForwardBlurSubsample& o, const GridImage& obs, double lam)
        : op(o),
          y(obs),
          lambda(lam),
          poisson(o.fine_rows(), o.fine_cols()),
          scratch_field(o.fine_rows(), o.fine_cols()),
          rhs(o.fine_rows() * o.fine_cols()),
          phi(o.fine_rows() * o.fine_cols()) {}

    double primal(const GridImage& u) {
        const GridImage r = op.forward(u);
        double data = 0.0;
        for (std::size_t k = 0; k < r.size(); ++k) {
            const double e = r.data()[k] - y.data()[k];
            data += e * e;
        }
        return 0.5 * data + lambda * total_variation(u);
    }

    struct Dual {
        double value = 0.0;
        double scale = 0.0;  // t, the feasible dual is (t p, t z_hat)
    };

    /// Makes (p, z) exactly feasible by a Poisson correction of z, then picks
    /// the best scaling of the pair.
    Dual dual(const GridImage& p, const DualField& z) {
        const GridImage a = op.adjoint(p);
        divergence_into(z, rhs);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= a.data()[k];
        poisson.solve(rhs, phi);
        gradient_into(phi, scratch_field);
        double m = 0.0;
        for (std::size_t k = 0; k < z.nodes(); ++k)
            m = std::max(m, std::hypot(z.zr[k] + scratch_field.zr[k],
                                       z.zc[k] + scratch_field.zc[k]));
        const double py = inner(p.data(), y.data());
        const double pp = sq_norm(p.data());
        if (pp == 0.0) return {0.0, 0.0};
        double t = -py / pp;
        if (m > 0.0) t = std::clamp(t, -lambda / m, lambda / m);
        return {-t * py - 0.5 * t * t * pp, t};
    }
};

}  // namespace

SolveResult solve_tv(const ForwardBlurSubsample& op, const GridImage& y, double lambda,
                     const SolveParams& params) {
    if (y.rows() != op.obs_rows() || y.cols() != op.obs_cols())
        throw DimensionMismatch("solve_tv: observation shape does not match the operator");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw InvalidArgument("solve_tv: lambda must be positive");
    if (params.check_every == 0) throw InvalidArgument("solve_tv: check_every must be positive");

    const std::size_t n = op.fine_rows(), m = op.fine_cols();
    const double L = std::sqrt(composite_norm_sq(op, params.power_iterations));
    double tau = 0.99 / L;
    double sigma = 0.99 / L;

    GridImage u = op.fine_image(), ubar = op.fine_image();
    GridImage p = op.observation_image();
    DualField z(n, m), g(n, m);
    std::vector<double> divz(n * m);
    Evaluator eval(op, y, lambda);
    const GridImage zero = op.fine_image();
    const double zero_primal = 0.5 * sq_norm(y.data());

    GridImage ergodic = u;  // running average of all iterates

    SolveResult best;
    best.lambda = lambda;
    best.operator_norm = L;
    double best_ngap = std::numeric_limits<double>::infinity();

    auto certify = [&](std::size_t iter) {
        // Primal side: the iterate, its running average, or zero.
        const double p_last = eval.primal(u);
        const double p_erg = eval.primal(ergodic);
        const GridImage* cu = &u;
        double primal = p_last;
        if (p_erg < primal) {
            cu = &ergodic;
            primal = p_erg;
        }
        if (zero_primal < primal) {
            cu = &zero;
            primal = zero_primal;
        }
        // Dual side: the iterate's p, or the residual the optimality relation
        // assigns to the chosen primal point.
        GridImage residual = op.forward(*cu);
        for (std::size_t k = 0; k < residual.size(); ++k) residual.data()[k] -= y.data()[k];
        const auto d_own = eval.dual(p, z);
        const auto d_res = eval.dual(residual, z);
        const bool use_res = d_res.value > d_own.value;
        const auto& d = use_res ? d_res : d_own;

        const double gap = primal - d.value;
        const double ngap = gap / (1.0 + std::abs(primal));
        best.history.push_back({iter, p_last, p_erg, d.value, ngap});
        if (ngap <= best_ngap) {
            best_ngap = ngap;
            best.u = *cu;
            best.primal_value = primal;
            best.dual_value = d.value;
            best.gap = gap;
            best.iterations = iter;
            best.dual_p = use_res ? residual : p;
            for (double& v : best.dual_p.data()) v *= -d.scale / lambda;
        }
        return best_ngap <= params.gap_tol;
    };

    if (certify(0)) return best;

    const double lam_sq = lambda * lambda;
    for (std::size_t it = 1; it <= params.max_iter; ++it) {
        const GridImage fu = op.forward(ubar);
        for (std::size_t k = 0; k < p.size(); ++k)
            p.data()[k] = (p.data()[k] + sigma * (fu.data()[k] - y.data()[k])) / (1.0 + sigma);

        gradient_into(ubar.data(), g);
        for (std::size_t k = 0; k < z.nodes(); ++k) {
            const double a = z.zr[k] + sigma * g.zr[k];
            const double b = z.zc[k] + sigma * g.zc[k];
            const double nn = a * a + b * b;
            const double s = nn > lam_sq ? lambda / std::sqrt(nn) : 1.0;
            z.zr[k] = a * s;
            z.zc[k] = b * s;
        }

        const GridImage ap = op.adjoint(p);
        divergence_into(z, divz);
        const double we = 1.0 / static_cast<double>(it + 1);
        for (std::size_t k = 0; k < u.size(); ++k) {
            const double old = u.data()[k];
            const double nu = old - tau * (ap.data()[k] - divz[k]);
            u.data()[k] = nu;
            ubar.data()[k] = 2.0 * nu - old;
            ergodic.data()[k] += we * (nu - ergodic.data()[k]);
        }

        if (it % params.check_every == 0 || it == params.max_iter) {
            if (it <= params.step_adapt_iterations) {
                // Empirical primal/dual step ratio from the current iterate scales.
                const double nu = std::sqrt(sq_norm(u.data()));
                const double nd = std::sqrt(sq_norm(p.data()) + sq_norm(z.zr) + sq_norm(z.zc));
                if (nu > 0.0 && nd > 0.0) {
                    const double r = 0.2 * std::pow(nu / nd, 0.7);
                    tau = 0.99 / L * r;
                    sigma = 0.99 / L / r;
                }
            }
            if (certify(it)) {
                best.iterations = it;
                return best;
            }
        }
    }
    const double ngap = best.normalized_gap();
    throw NotConverged("solve_tv: normalized duality gap " + std::to_string(ngap) + " after " +
                           std::to_string(params.max_iter) + " iterations",
                       best.gap, params.max_iter, best);
}

namespace {

/// prox of t * max_k |z_k|: clip every node norm at the level mu with
/// sum_k max(|z_k| - mu, 0) = t.
void prox_max_norm(DualField& z, double t, std::vector<double>& norms,
                   std::vector<double>& active) {
    const std::size_t n = z.nodes();
    norms.resize(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        norms[k] = std::sqrt(z.zr[k] * z.zr[k] + z.zc[k] * z.zc[k]);
        total += norms[k];
    }
    if (total <= t) {
        std::fill(z.zr.begin(), z.zr.end(), 0.0);
        std::fill(z.zc.begin(), z.zc.end(), 0.0);
        return;
    }
    active.clear();
    for (double a : norms)
        if (a > 0.0) active.push_back(a);
    double mu = 0.0;
    for (;;) {
        const double s = std::accumulate(active.begin(), active.end(), 0.0);
        const double next = (s - t) / static_cast<double>(active.size());
        const std::size_t before = active.size();
        std::erase_if(active, [next](double a) { return a <= next; });
        mu = next;
        if (active.size() == before) break;
    }
    for (std::size_t k = 0; k < n; ++k)
        if (norms[k] > mu) {
            const double s = mu / norms[k];
            z.zr[k] *= s;
            z.zc[k] *= s;
        }
}

}  // namespace

GnormResult discrete_gnorm_detailed(const GridImage& eta, const GnormParams& params) {
    for (double v : eta.data())
        if (!std::isfinite(v)) throw InvalidArgument("discrete_gnorm: eta must be finite");
    if (params.check_every == 0) throw InvalidArgument("discrete_gnorm: check_every must be positive");
    const double scale = eta.max_abs();
    GnormResult out;
    if (scale == 0.0) return out;

    const std::size_t n = eta.rows(), m = eta.cols(), N = n * m;
    std::vector<double> b(N);
    for (std::size_t k = 0; k < N; ++k) b[k] = eta.data()[k] / scale;

    PoissonSolver poisson(n, m);
    std::vector<double> phi(N), rhs(N), u(N, 0.0), divz(N);
    DualField z(n, m), zbar(n, m), g(n, m), corr(n, m);
    std::vector<double> norms, active;

    // Least-squares start: z = D phi with D^T D phi = -b, so div z = b.
    for (std::size_t k = 0; k < N; ++k) rhs[k] = -b[k];
    poisson.solve(rhs, phi);
    gradient_into(phi, z);
    zbar = z;
    // u starts along (D^T D)^{-1} b with TV(u) = 1, which also fixes the
    // relative scale of the two step sizes.
    {
        const double tv = total_variation(phi, n, m);
        for (std::size_t k = 0; k < N; ++k) u[k] = -phi[k] / tv;
    }
    const double ratio = std::sqrt(sq_norm(z.zr) + sq_norm(z.zc)) / std::sqrt(sq_norm(u));

    const double step = 0.99 / std::sqrt(8.0);
    const double tau = step * ratio, sigma = step / ratio;

    double upper = std::numeric_limits<double>::infinity();
    double lower = 0.0;
    DualField z_avg = z;
    std::vector<double> u_avg = u, level(N);
    std::size_t averaged = 1;

    // Upper bound: project the field onto {div z = b} and take its max norm.
    auto upper_from = [&](const DualField& field) {
        divergence_into(field, rhs);
        for (std::size_t k = 0; k < N; ++k) rhs[k] -= b[k];
        poisson.solve(rhs, phi);
        gradient_into(phi, corr);
        double mx = 0.0;
        for (std::size_t k = 0; k < field.nodes(); ++k) {
            corr.zr[k] += field.zr[k];
            corr.zc[k] += field.zc[k];
            mx = std::max(mx, std::sqrt(corr.zr[k] * corr.zr[k] + corr.zc[k] * corr.zc[k]));
        }
        if (mx < upper) {
            upper = mx;
            divergence_into(corr, divz);
            double res = 0.0;
            for (std::size_t k = 0; k < N; ++k) res = std::max(res, std::abs(divz[k] - b[k]));
            out.divergence_residual = res * scale;
        }
        return mx;
    };
    // Lower bound: <b, v> / TV(v) for v = u and for indicators of its level sets.
    auto ratio_of = [&](std::span<const double> v) {
        const double tv = total_variation(v, n, m);
        return tv > 0.0 ? std::abs(inner(b, v)) / tv : 0.0;
    };
    auto lower_from = [&](const std::vector<double>& v) {
        double best = ratio_of(v);
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        constexpr int kLevels = 24;
        for (int l = 1; l < kLevels; ++l) {
            const double t = *lo + (*hi - *lo) * l / kLevels;
            for (std::size_t k = 0; k < N; ++k) level[k] = v[k] > t ? 1.0 : 0.0;
            best = std::max(best, ratio_of(level));
        }
        lower = std::max(lower, best);
        return best;
    };
    // Restarting from the better of the last iterate and the running average
    // once its bound gap has shrunk enough since the previous restart.
    constexpr double kRestartFactor = 0.5;
    double restart_gap = std::numeric_limits<double>::infinity();
    auto bounds = [&]() {
        const double g_last = upper_from(z) - lower_from(u);
        const double g_avg = upper_from(z_avg) - lower_from(u_avg);
        if (std::min(g_last, g_avg) <= kRestartFactor * restart_gap) {
            if (g_avg < g_last) {
                z = z_avg;
                u = u_avg;
            }
            z_avg = z;
            u_avg = u;
            averaged = 1;
            restart_gap = std::min(g_last, g_avg);
        }
        return upper - lower <= params.tol * upper;
    };

    std::size_t it = 0;
    bool done = bounds();
    while (!done && it < params.max_iter) {
        ++it;
        // z step, then u step with the extrapolated z
        gradient_into(u, g);
        zbar = z;
        for (std::size_t k = 0; k < z.nodes(); ++k) {
            z.zr[k] += tau * g.zr[k];
            z.zc[k] += tau * g.zc[k];
        }
        prox_max_norm(z, tau, norms, active);
        for (std::size_t k = 0; k < z.nodes(); ++k) {
            zbar.zr[k] = 2.0 * z.zr[k] - zbar.zr[k];
            zbar.zc[k] = 2.0 * z.zc[k] - zbar.zc[k];
        }
        divergence_into(zbar, divz);
        for (std::size_t k = 0; k < N; ++k) u[k] += sigma * (divz[k] - b[k]);

        ++averaged;
        const double w = 1.0 / static_cast<double>(averaged);
        for (std::size_t k = 0; k < z.nodes(); ++k) {
            z_avg.zr[k] += w * (z.zr[k] - z_avg.zr[k]);
            z_avg.zc[k] += w * (z.zc[k] - z_avg.zc[k]);
        }
        for (std::size_t k = 0; k < N; ++k) u_avg[k] += w * (u[k] - u_avg[k]);
        if (it % params.check_every == 0) done = bounds();
    }
    out.value = upper * scale;
    out.lower_bound = lower * scale;
    out.iterations = it;
    if (!done)
        throw NotConverged("discrete_gnorm: bounds [" + std::to_string(out.lower_bound) + ", " +
                               std::to_string(out.value) + "] after " + std::to_string(it) +
                               " iterations",
                           out.value - out.lower_bound, it);
    return out;
}

double discrete_gnorm(const GridImage& eta, const GnormParams& params) {
    return discrete_gnorm_detailed(eta, params).value;
}

double discrete_gnorm_of_field(const GridImage& eta, const GnormParams& params) {
    GridImage scaled = eta;
    for (double& v : scaled.data()) v *= eta.pixel_size();
    return discrete_gnorm(scaled, params);
}

double lambda_max(const ForwardBlurSubsample& op, const GridImage& y, const GnormParams& params) {
    return discrete_gnorm(op.adjoint(y), params);
}

}  // namespace tvcert::tvgrid
