#include "tvcert/bessel.hpp"

#include <cmath>
#include <numbers>

namespace tvcert {
namespace {

// Power series (all terms positive, no cancellation) up to this point; the
// Hankel expansion beyond it has a smallest term below 1e-17. At x = 8 the
// asymptotic expansion would only reach ~1e-7.
constexpr double kSeriesLimit = 20.0;
constexpr int kMaxTerms = 80;

struct SeriesTables {
    double inv_sq[kMaxTerms + 1];    // 1 / (k k)
    double inv_pair[kMaxTerms + 1];  // 1 / (k (k+1))
    SeriesTables() {
        inv_sq[0] = inv_pair[0] = 0.0;
        for (int k = 1; k <= kMaxTerms; ++k) {
            inv_sq[k] = 1.0 / (static_cast<double>(k) * k);
            inv_pair[k] = 1.0 / (static_cast<double>(k) * (k + 1));
        }
    }
};
const SeriesTables kTables;

double i0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        term *= q * kTables.inv_sq[k];
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

double i1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 0.5 * x, sum = term;
    for (int k = 1; k <= kMaxTerms; ++k) {
        term *= q * kTables.inv_pair[k];
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

// sum_k (-1)^k a_k(nu) / x^k for nu in {0, 1}, truncated at the smallest term.
double hankel_sum(double x, int nu) {
    const double mu = 4.0 * nu * nu;
    const double inv8x = 1.0 / (8.0 * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = term * (odd * odd - mu) * inv8x / k;
        if (std::abs(next) >= std::abs(term)) break;
        term = next;
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

double i0e(double x) {
    x = std::abs(x);
    if (x <= kSeriesLimit) return std::exp(-x) * i0_series(x);
    return hankel_sum(x, 0) / std::sqrt(2.0 * std::numbers::pi * x);
}

double i1e(double x) {
    const double ax = std::abs(x);
    const double v = ax <= kSeriesLimit ? std::exp(-ax) * i1_series(ax)
                                        : hankel_sum(ax, 1) / std::sqrt(2.0 * std::numbers::pi * ax);
    return x < 0 ? -v : v;
}

}  // namespace tvcert
