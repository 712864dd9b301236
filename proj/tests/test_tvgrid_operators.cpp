#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <vector>

#include "tvcert/errors.hpp"
#include "tvcert/tvgrid/grid_image.hpp"
#include "tvcert/tvgrid/operators.hpp"

using namespace tvcert;
using namespace tvcert::tvgrid;

namespace {

GridImage random_image(std::size_t r, std::size_t c, std::mt19937_64& rng, double h = 1.0) {
    std::normal_distribution<double> n;
    GridImage g(r, c, h);
    for (double& v : g.data()) v = n(rng);
    return g;
}

double norm(const GridImage& g) { return std::sqrt(dot(g, g)); }

}  // namespace

TEST_CASE("GridImage construction and geometry") {
    CHECK_THROWS_AS(GridImage(0, 3), InvalidDims);
    CHECK_THROWS_AS(GridImage(3, 3, 0.0), InvalidDims);
    CHECK_THROWS_AS(GridImage(2, 2, 1.0, {1, 2, 3}), InvalidDims);
    CHECK_THROWS_AS(GridImage(1, 2, 1.0, {1, NAN}), InvalidArgument);
    const GridImage g(4, 6, 0.5, std::vector<double>(24, -2.0));
    CHECK(g.max_abs() == 2.0);
    CHECK(g(3, 5) == -2.0);
    // centered grid
    CHECK(g.x_center(0) == doctest::Approx(-1.25));
    CHECK(g.x_center(5) == doctest::Approx(1.25));
    CHECK(g.y_center(0) + g.y_center(3) == doctest::Approx(0.0));
    CHECK(g.same_shape(GridImage(4, 6)));
    CHECK_FALSE(g.same_shape(GridImage(6, 4)));
    CHECK_THROWS_AS(dot(g, GridImage(6, 4)), DimensionMismatch);
}

TEST_CASE("grid file round trip") {
    std::mt19937_64 rng(3);
    const auto g = random_image(5, 7, rng, 0.25);
    std::stringstream s;
    write_grid(s, g);
    std::string header;
    std::getline(s, header);
    CHECK(header == "P_GRID 5 7 0.25");
    s.seekg(0);
    const auto back = read_grid(s);
    CHECK(back.rows() == 5);
    CHECK(back.cols() == 7);
    CHECK(back.pixel_size() == 0.25);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(back.data()[k] == g.data()[k]);
    // payload is little-endian float64, row-major
    const std::string bytes = s.str().substr(header.size() + 1, 8);
    double first;
    std::memcpy(&first, bytes.data(), 8);
    CHECK(first == g(0, 0));

    std::stringstream bad("P_GRID 2 x 1\n");
    CHECK_THROWS_AS(read_grid(bad), InvalidArgument);
    std::stringstream trunc("P_GRID 2 2 1\n1234");
    CHECK_THROWS_AS(read_grid(trunc), InvalidArgument);
    std::stringstream wrong("Q_GRID 1 1 1\n");
    CHECK_THROWS_AS(read_grid(wrong), InvalidArgument);
}

TEST_CASE("forward operator basics") {
    const ForwardBlurSubsample op(2.0, 5, 6, 4);
    CHECK(op.fine_rows() == 30);
    CHECK(op.fine_cols() == 20);
    double taps = 0.0;
    for (double t : op.taps()) taps += t;
    CHECK(taps == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(op.taps().size() == 2 * 8 + 1);

    GridImage c(30, 20, 1.0, std::vector<double>(600, 3.5));
    const auto y = op.forward(c);
    CHECK(y.rows() == 6);
    CHECK(y.cols() == 4);
    for (double v : y.data()) CHECK(v == doctest::Approx(3.5).epsilon(1e-14));
    const auto y0 = op.forward(op.fine_image());
    for (double v : y0.data()) CHECK(v == 0.0);
    CHECK_THROWS_AS(op.forward(GridImage(20, 30)), DimensionMismatch);
    CHECK_THROWS_AS(op.adjoint(GridImage(4, 6)), DimensionMismatch);
    CHECK_THROWS_AS(ForwardBlurSubsample(0.0, 5, 6, 4), InvalidArgument);
    CHECK_THROWS_AS(ForwardBlurSubsample(1.0, 0, 6, 4), InvalidDims);
    CHECK(op.observation_image().pixel_size() == 5.0);
}

TEST_CASE("forward samples a blurred delta at cell centers") {
    const ForwardBlurSubsample op(1.0, 3, 4, 4);
    GridImage d = op.fine_image();
    d(op.sample_index(1), op.sample_index(2)) = 1.0;
    const auto y = op.forward(d);
    const double t0 = op.taps()[op.taps().size() / 2];
    CHECK(y(1, 2) == doctest::Approx(t0 * t0));
    CHECK(y(0, 0) == 0.0);  // column offset 6 exceeds the tap radius 4
}

TEST_CASE("adjoint consistency on random pairs") {
    std::mt19937_64 rng(42);
    for (const auto& op : {ForwardBlurSubsample(2.0, 5, 10, 8), ForwardBlurSubsample(0.7, 3, 5, 9, 0.5),
                           ForwardBlurSubsample(3.0, 4, 3, 3)}) {
        for (int k = 0; k < 10; ++k) {
            const auto u = random_image(op.fine_rows(), op.fine_cols(), rng);
            const auto y = random_image(op.obs_rows(), op.obs_cols(), rng);
            const double lhs = dot(op.forward(u), y);
            const double rhs = dot(u, op.adjoint(y));
            CHECK(std::abs(lhs - rhs) <= 1e-10 * norm(u) * norm(y));
        }
    }
}

TEST_CASE("gradient and divergence are negative adjoints") {
    std::mt19937_64 rng(7);
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{1, 1}, {5, 9}, {16, 16}}) {
        const auto u = random_image(r, c, rng);
        DualField z(r, c);
        std::normal_distribution<double> n;
        for (auto& v : z.zr) v = n(rng);
        for (auto& v : z.zc) v = n(rng);
        const auto g = gradient(u);
        double lhs = 0.0;
        for (std::size_t k = 0; k < z.nodes(); ++k) lhs += g.zr[k] * z.zr[k] + g.zc[k] * z.zc[k];
        const double rhs = -dot(u, divergence(z));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("total variation with zero extension") {
    CHECK(total_variation(GridImage(6, 6)) == 0.0);
    // a single pixel of height a: three nonzero node gradients
    GridImage p(5, 5);
    p(2, 2) = 2.0;
    CHECK(total_variation(p) == doctest::Approx(2.0 * (2.0 + std::sqrt(2.0))));
    // TV is the sum of node norms of the gradient
    std::mt19937_64 rng(11);
    const auto u = random_image(7, 4, rng);
    const auto g = gradient(u);
    double s = 0.0;
    for (std::size_t k = 0; k < g.nodes(); ++k) s += std::hypot(g.zr[k], g.zc[k]);
    CHECK(total_variation(u) == doctest::Approx(s).epsilon(1e-13));
    CHECK(g.max_norm() > 0.0);
    // positive homogeneity
    GridImage u2 = u;
    for (double& v : u2.data()) v *= -3.0;
    CHECK(total_variation(u2) == doctest::Approx(3.0 * total_variation(u)));
}

TEST_CASE("Poisson solve inverts D^T D") {
    std::mt19937_64 rng(5);
    for (auto [r, c] : {std::pair<std::size_t, std::size_t>{1, 1}, {8, 13}, {32, 32}}) {
        const auto f = random_image(r, c, rng);
        std::vector<double> phi(r * c);
        PoissonSolver solver(r, c);
        solver.solve(f.data(), phi);
        const auto g = gradient(GridImage(r, c, 1.0, phi));
        const auto back = divergence(g);  // = -D^T D phi
        double worst = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(-back.data()[k] - f.data()[k]));
        CHECK(worst <= 1e-10 * f.max_abs());
    }
    PoissonSolver s(3, 3);
    std::vector<double> small(4), out(9);
    CHECK_THROWS_AS(s.solve(small, out), DimensionMismatch);
}
