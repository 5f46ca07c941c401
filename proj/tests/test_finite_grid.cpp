#include "gridres/finite_grid.hpp"
#include "gridres/oracle.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gridres;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("grid spec validation") {
    CHECK_THROWS_AS(GridSpec(1, 1, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(0, 5, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(3, 3, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(GridSpec(3, 3, 1.0, -2.0), std::invalid_argument);
    const GridSpec two_by_one(2, 1, 1.0, 1.0);  // a single resistor is a valid grid
    CHECK(two_by_one.node_count() == 2);
    const GridSpec g(4, 6, 3.0, 1.5);
    CHECK(g.alpha() == doctest::Approx(2.0));
    CHECK(g.r0() == 1.5);
}

TEST_CASE("mirror images") {
    const MirrorFamily a = mirror_images({0, 0});
    CHECK(a.images[0] == ImagePoint{0, 0});
    CHECK(a.images[1] == ImagePoint{-1, 0});
    CHECK(a.images[2] == ImagePoint{0, -1});
    CHECK(a.images[3] == ImagePoint{-1, -1});

    const MirrorFamily b = mirror_images({3, 2});
    CHECK(b.images[1] == ImagePoint{-4, 2});
    CHECK(b.images[2] == ImagePoint{3, -3});
    CHECK(b.images[3] == ImagePoint{-4, -3});

    const MirrorFamily c = mirror_images({4, 4});
    CHECK(c.images[1] == ImagePoint{-5, 4});
    CHECK(c.images[3] == ImagePoint{-5, -5});
}

TEST_CASE("isotropic point metric") {
    const Anisotropy a(7.3);
    const Complex z0 = isotropic_point(2, 5, a);
    const Complex z1 = isotropic_point(6, 1, a);
    const double dx = 4.0, dy = -4.0;
    CHECK(std::norm(z1 - z0) == doctest::Approx(dx * dx + dy * dy / a.alpha).epsilon(1e-15));
}

TEST_CASE("theta context") {
    const ThetaContext square = theta_context(GridSpec(50, 50, 1.0, 1.0));
    CHECK(square.tau.real() == 0.0);
    CHECK(square.tau.imag() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(square.nome) == doctest::Approx(std::exp(-kPi)).epsilon(1e-14));
    CHECK_FALSE(square.swapped);

    // Raw nome e^{-0.02 pi} = 0.939 > 0.9 forces the modular swap.
    const ThetaContext wide = theta_context(GridSpec(100, 2, 1.0, 1.0));
    CHECK(wide.swapped);
    CHECK(wide.tau.imag() == doctest::Approx(50.0).epsilon(1e-13));
    CHECK(std::abs(wide.nome) <= 0.9);

    // Strong anisotropy squashes the effective aspect ratio.
    const ThetaContext aniso = theta_context(GridSpec(10, 10, 100.0, 1.0));
    CHECK(aniso.tau.imag() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(std::abs(aniso.nome) == doctest::Approx(std::exp(-0.1 * kPi)).epsilon(1e-13));
    CHECK_FALSE(aniso.swapped);

    // The constructed nome never exceeds 0.9 in magnitude.
    for (const auto& g : {GridSpec(2, 400, 1.0, 1.0), GridSpec(400, 2, 1.0, 1.0),
                          GridSpec(30, 7, 50.0, 1.0), GridSpec(7, 30, 1.0, 50.0)})
        CHECK(std::abs(theta_context(g).nome) <= 0.9);

    // Tall enough that the nome underflows the double range entirely; the
    // log-space evaluation must still work off tau.
    const ThetaContext extreme = theta_context(GridSpec(3, 500, 1.0, 9.0));
    CHECK_FALSE(extreme.swapped);
    CHECK(extreme.tau.imag() == doctest::Approx(500.0).epsilon(1e-13));
    CHECK(std::abs(extreme.nome) == 0.0);
}

TEST_CASE("closed form survives nome underflow") {
    const GridSpec tall(3, 500, 1.0, 9.0);
    const double closed = r_theta_closed({0, 0}, {2, 499}, tall);
    const double oracle = r_oracle({0, 0}, {2, 499}, tall);
    CHECK(std::abs(closed - oracle) / oracle < 0.005);

    const GridSpec chain(400, 2, 1.0, 1.0);  // swap path with large resistances
    const double c2 = r_theta_closed({0, 0}, {399, 1}, chain);
    const double o2 = r_oracle({0, 0}, {399, 1}, chain);
    CHECK(std::abs(c2 - o2) / o2 < 0.005);
}

TEST_CASE("r_theta_closed basics") {
    const GridSpec g(5, 5, 1.0, 1.0);
    CHECK(r_theta_closed({2, 2}, {2, 2}, g) == 0.0);
    CHECK_THROWS_AS(r_theta_closed({5, 0}, {1, 1}, g), std::out_of_range);
    CHECK_THROWS_AS(r_theta_closed({0, 0}, {0, -1}, g), std::out_of_range);

    // Strong near-field pair on the smallest square: series-parallel oracle
    // value is exactly 0.75; the uncorrected closed form lands within a few
    // percent and the deviation is what the hybrid layer removes.
    const GridSpec tiny(2, 2, 1.0, 1.0);
    const double closed = r_theta_closed({0, 0}, {1, 0}, tiny);
    CHECK(std::abs(closed - 0.75) / 0.75 < 0.05);
    CHECK(closed > 0.0);
}

TEST_CASE("r_theta_closed against the oracle at mid range") {
    // Closed form only (no near-field corrections): 0.5% tolerance.
    const GridSpec g(50, 50, 1.0, 1.0);
    const double closed = r_theta_closed({0, 0}, {25, 25}, g);
    const double oracle = r_oracle({0, 0}, {25, 25}, g);
    CHECK(std::abs(closed - oracle) / oracle < 0.005);
}

TEST_CASE("image displacements in ellipse") {
    const GridSpec g(4, 4, 1.0, 1.0);
    const auto list = image_displacements_in_ellipse({0, 0}, {0, 0}, g, 25.0, -1);
    CHECK(!list.empty());
    bool has_origin = false, has_x_reflection = false, has_y_reflection = false;
    for (const auto& s : list) {
        CHECK(s.sign == -1);
        CHECK(double(s.d.dx) * s.d.dx + double(s.d.dy) * s.d.dy <= 25.0);
        if (s.d == Displacement{0, 0}) has_origin = true;
        if (s.d == Displacement{1, 0}) has_x_reflection = true;
        if (s.d == Displacement{0, 1}) has_y_reflection = true;
    }
    CHECK(has_origin);
    CHECK(has_x_reflection);
    CHECK(has_y_reflection);

    // Empty ellipse when no image coincides with the query point.
    CHECK(image_displacements_in_ellipse({0, 0}, {2, 1}, g, 0.0, +1).empty());

    // Far corner pair under strong anisotropy: images stay outside.
    const GridSpec big(50, 50, 10.0, 1.0);
    const auto far = image_displacements_in_ellipse({0, 0}, {49, 49}, big, 250.0, +1);
    for (const auto& s : far)
        CHECK(10.0 * s.d.dx * s.d.dx + double(s.d.dy) * s.d.dy <= 250.0);
    CHECK(far.size() <= 2);

    // Deterministic ordering between calls.
    const auto again = image_displacements_in_ellipse({0, 0}, {0, 0}, g, 25.0, -1);
    REQUIRE(again.size() == list.size());
    for (std::size_t i = 0; i < list.size(); ++i) CHECK(again[i].d == list[i].d);
}
