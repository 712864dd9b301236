#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "tvcert/errors.hpp"
#include "tvcert/tvgrid/level_structure.hpp"
#include "tvcert/tvgrid/phantom.hpp"

using namespace tvcert;
using namespace tvcert::tvgrid;

TEST_CASE("disk phantom area is within the rasterization bound") {
    for (double h : {1.0, 0.5})
        for (double R : {3.0, 10.0, 17.3}) {
            const auto u = make_phantom(Phantom::disk(R), 100, 100, h);
            double count = 0;
            for (double v : u.data()) {
                CHECK((v == 0.0 || v == 1.0));
                count += v;
            }
            const double expected = std::numbers::pi * R * R / (h * h);
            CHECK(std::abs(count - expected) <= 2 * 2 * std::numbers::pi * R / h);
        }
}

TEST_CASE("annulus phantom") {
    const auto u = make_phantom(Phantom::annulus(5.0, 10.0), 40, 40, 1.0);
    CHECK(u(20, 20) == 0.0);
    CHECK(u(20, 28) == 1.0);
    const auto st = level_structure(u);
    CHECK(st.component_count() == 1);
    CHECK_THROWS_AS(make_phantom(Phantom::annulus(5.0, 4.0), 40, 40, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_phantom(Phantom::disk(-1.0), 40, 40, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_phantom(Phantom::disk(1.0), 0, 40, 1.0), InvalidDims);
}

TEST_CASE("three_shapes amplitudes and disjointness") {
    for (std::size_t n : {60u, 250u}) {
        const auto u = make_phantom(Phantom::three_shapes(), n, n, 1.0);
        std::set<double> values(u.data().begin(), u.data().end());
        CHECK(values == std::set<double>{-2.0, 0.0, 1.0, 2.0});
        // each blob is one 4-connected piece and no two share a pixel
        const auto st = level_structure(u, 0.25);
        REQUIRE(st.component_count() == 3);
        std::multiset<double> amps;
        std::size_t pixels = 0;
        for (const auto& c : st.components) {
            amps.insert(c.mean_amplitude);
            CHECK(c.median_amplitude == c.mean_amplitude);
            pixels += c.pixel_count;
        }
        CHECK(amps == std::multiset<double>{-2.0, 1.0, 2.0});
        std::size_t nonzero = 0;
        for (double v : u.data()) nonzero += v != 0.0;
        CHECK(pixels == nonzero);
    }
}

TEST_CASE("phantom names") {
    CHECK(Phantom::parse_kind("disk") == Phantom::Kind::Disk);
    CHECK(Phantom::parse_kind("annulus") == Phantom::Kind::Annulus);
    CHECK(Phantom::parse_kind("three_shapes") == Phantom::Kind::ThreeShapes);
    CHECK(to_string(Phantom::Kind::ThreeShapes) == "three_shapes");
    CHECK_THROWS_AS(Phantom::parse_kind("square"), InvalidArgument);
}

TEST_CASE("rasterize samples pixel centers") {
    const auto g = rasterize([](double x, double y) { return x + 10 * y; }, 3, 4, 0.5);
    CHECK(g(0, 0) == doctest::Approx(g.x_center(0) + 10 * g.y_center(0)));
    CHECK(g(2, 3) == doctest::Approx(g.x_center(3) + 10 * g.y_center(2)));
}

TEST_CASE("noise is deterministic per seed with the requested spread") {
    const GridImage y(100, 100, 1.0);
    const auto a = add_noise(y, 0.1, 7), b = add_noise(y, 0.1, 7), c = add_noise(y, 0.1, 8);
    double ss = 0.0, mean = 0.0;
    bool same = true, differ = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        same = same && a.data()[k] == b.data()[k];
        differ = differ || a.data()[k] != c.data()[k];
        ss += a.data()[k] * a.data()[k];
        mean += a.data()[k];
    }
    CHECK(same);
    CHECK(differ);
    CHECK(std::sqrt(ss / 1e4) == doctest::Approx(0.1).epsilon(0.03));
    CHECK(std::abs(mean / 1e4) < 0.005);
    CHECK(add_noise(y, 0.0, 1).max_abs() == 0.0);
    CHECK_THROWS_AS(add_noise(y, -1.0, 1), InvalidArgument);
}

TEST_CASE("level structure of simple images") {
    GridImage u(30, 30, 0.5);
    CHECK(level_structure(u).component_count() == 0);

    // two disjoint squares with opposite signs, the negative one larger
    for (std::size_t i = 2; i < 6; ++i)
        for (std::size_t j = 2; j < 6; ++j) u(i, j) = 1.0;
    for (std::size_t i = 10; i < 20; ++i)
        for (std::size_t j = 15; j < 25; ++j) u(i, j) = -1.5;
    auto st = level_structure(u);
    REQUIRE(st.component_count() == 2);
    CHECK(st.threshold == doctest::Approx(0.75));
    CHECK(st.components[0].sign == -1);
    CHECK(st.components[0].pixel_count == 100);
    CHECK(st.components[0].area == doctest::Approx(25.0));
    CHECK(st.components[0].mean_amplitude == -1.5);
    CHECK(st.components[0].row_min == 10);
    CHECK(st.components[0].col_max == 24);
    CHECK(st.components[1].sign == 1);
    CHECK(st.components[1].mean_amplitude * st.components[0].mean_amplitude < 0.0);

    // at fraction 0.75 the weaker square drops out
    CHECK(level_structure(u, 0.75).component_count() == 1);
    // a size filter removes the small square
    CHECK(level_structure(u, 0.5, 17).component_count() == 1);

    // touching pixels of opposite sign stay separate; diagonal neighbours are not connected
    GridImage v(4, 4);
    v(1, 1) = 1.0;
    v(1, 2) = -1.0;
    v(2, 3) = -1.0;
    CHECK(level_structure(v).component_count() == 3);

    CHECK_THROWS_AS(level_structure(v, 0.0), InvalidArgument);
    CHECK_THROWS_AS(level_structure(v, 1.5), InvalidArgument);
}

TEST_CASE("level structure CSV has full precision") {
    GridImage u(3, 3);
    u(1, 1) = 1.0 / 3.0;
    std::ostringstream out;
    write_level_structure_csv(out, level_structure(u));
    const std::string s = out.str();
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.substr(0, s.find('\n')).find("pixel_count") != std::string::npos);
}
