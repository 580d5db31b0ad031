#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "gridwaves/errors.hpp"
#include "gridwaves/mesh.hpp"

using namespace gridwaves;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_SUITE("mesh") {

TEST_CASE("uniform grid geometry") {
    Grid1D g = uniform_grid(99);
    CHECK(g.n_interior == 99);
    CHECK(g.step == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(g.nodes.size() == 101);
    CHECK(g.nodes.front() == -1.0);
    CHECK(g.nodes.back() == 1.0);
    CHECK(g.nodes[37] == doctest::Approx(-1.0 + 37 * 0.02).epsilon(1e-14));

    CHECK_THROWS_AS(uniform_grid(0), std::invalid_argument);
}

TEST_CASE("identity map is exact") {
    MeshMap map = identity_map();
    CHECK(map(0.37) == 0.37);
    CHECK(map.deriv(-0.9) == 1.0);
    CHECK(map.second_deriv(0.5) == 0.0);
    CHECK(map.inverse(0.37) == 0.37);
    CHECK(map.bounds().deriv_lower == 1.0);
    CHECK(map.bounds().deriv_upper == 1.0);
    CHECK(map.bounds().second_upper == 0.0);
}

TEST_CASE("center-refining map values") {
    MeshMap map = tan_center_map();
    CHECK(map(0.0) == 0.0);
    CHECK(map(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(map(-1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    // g'(x) = (pi/4) sec^2(pi x/4): slowest at the center, fastest at the walls.
    CHECK(map.deriv(0.0) == doctest::Approx(pi / 4.0).epsilon(1e-15));
    CHECK(map.deriv(1.0) == doctest::Approx(pi / 2.0).epsilon(1e-14));
    CHECK(map.bounds().deriv_lower == doctest::Approx(pi / 4.0).epsilon(1e-15));
    CHECK(map.bounds().deriv_upper == doctest::Approx(pi / 2.0).epsilon(1e-15));
    CHECK(map.bounds().second_upper == doctest::Approx(pi * pi / 4.0).epsilon(1e-15));
    CHECK(map.second_deriv(0.0) == 0.0);
    // second derivative peaks at the walls: g''(1) = (pi^2/8) sec^2 tan * 2 -> pi^2/4.
    CHECK(std::abs(map.second_deriv(1.0)) == doctest::Approx(pi * pi / 4.0).epsilon(1e-13));
    CHECK(map.inverse(map(0.6180339887)) == doctest::Approx(0.6180339887).epsilon(1e-13));
}

TEST_CASE("boundary-refining map values") {
    MeshMap map = sin_boundary_map();
    CHECK(map(0.0) == 0.0);
    CHECK(map(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(map(-1.0) == doctest::Approx(-1.0).epsilon(1e-15));
    // g'(x) = (pi/3) cos(pi x/6): fastest at the center, slowest at the walls.
    CHECK(map.deriv(0.0) == doctest::Approx(pi / 3.0).epsilon(1e-15));
    CHECK(map.deriv(1.0) == doctest::Approx(pi * std::sqrt(3.0) / 6.0).epsilon(1e-14));
    CHECK(map.bounds().deriv_lower == doctest::Approx(pi * std::sqrt(3.0) / 6.0).epsilon(1e-15));
    CHECK(map.bounds().deriv_upper == doctest::Approx(pi / 3.0).epsilon(1e-15));
    // |g''| = (pi^2/18) |sin(pi x/6)| peaks at the walls where sin = 1/2.
    CHECK(map.bounds().second_upper == doctest::Approx(pi * pi / 36.0).epsilon(1e-15));
    CHECK(map.inverse(map(-0.437)) == doctest::Approx(-0.437).epsilon(1e-13));
}

TEST_CASE("map registry") {
    CHECK(mesh_map_by_name("identity").name() == "identity");
    CHECK(mesh_map_by_name("tan_center").name() == "tan_center");
    CHECK(mesh_map_by_name("sin_boundary").name() == "sin_boundary");
    CHECK(builtin_maps().size() == 3);
    CHECK_THROWS_AS(mesh_map_by_name("parabolic"), std::invalid_argument);
}

TEST_CASE("all builtin maps validate") {
    for (const MeshMap& map : builtin_maps()) {
        MeshMapReport report = validate_mesh_map(map);
        CAPTURE(map.name());
        CHECK(report.ok());
        CHECK(std::abs(report.endpoint_residual_left) <= 1e-12);
        CHECK(std::abs(report.endpoint_residual_right) <= 1e-12);
        CHECK(report.max_inverse_residual <= 1e-10);
    }
}

TEST_CASE("transformed grid geometry on the identity map") {
    TransformedGrid1D grid = transform_grid(uniform_grid(9), identity_map());
    const double h = 0.2;
    for (double c : grid.cell) CHECK(c == doctest::Approx(h).epsilon(1e-14));
    for (int j = 1; j <= 9; ++j) CHECK(grid.dual[j] == doctest::Approx(h).epsilon(1e-14));
    CHECK(grid.dual.front() == doctest::Approx(h / 2.0).epsilon(1e-14));
    CHECK(grid.dual.back() == doctest::Approx(h / 2.0).epsilon(1e-14));
    CHECK(grid.midpoints[0] == doctest::Approx(-0.9).epsilon(1e-14));
}

TEST_CASE("dual cells partition the interval") {
    for (const MeshMap& map : builtin_maps()) {
        TransformedGrid1D grid = transform_grid(uniform_grid(57), map);
        double total = 0.0;
        for (double d : grid.dual) total += d;
        CAPTURE(map.name());
        CHECK(total == doctest::Approx(2.0).epsilon(1e-13));
        double cells = 0.0;
        for (double c : grid.cell) cells += c;
        CHECK(cells == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("cell size extremes follow the map") {
    TransformedGrid1D center = transform_grid(uniform_grid(99), tan_center_map());
    auto cmin = std::min_element(center.cell.begin(), center.cell.end());
    auto cmax = std::max_element(center.cell.begin(), center.cell.end());
    long imin = cmin - center.cell.begin();
    // 100 cells: the smallest straddle the center, the largest sit at the walls.
    CHECK((imin == 49 || imin == 50));
    long imax = cmax - center.cell.begin();
    CHECK((imax == 0 || imax == 99));

    TransformedGrid1D boundary = transform_grid(uniform_grid(99), sin_boundary_map());
    auto bmin = std::min_element(boundary.cell.begin(), boundary.cell.end());
    long bimin = bmin - boundary.cell.begin();
    CHECK((bimin == 0 || bimin == 99));
}

TEST_CASE("non-monotone maps are rejected") {
    MeshMap bad("folded", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
                [](double) { return 2.0; }, [](double x) { return std::sqrt(std::abs(x)); },
                MeshMapBounds{0.1, 2.0, 2.0});
    CHECK_THROWS_AS(transform_grid(uniform_grid(9), bad), InvalidMeshError);
}

TEST_CASE("validation flags wrong bounds") {
    auto g = [](double x) { return std::tan(pi * x / 4.0); };
    auto dg = [](double x) {
        double c = std::cos(pi * x / 4.0);
        return pi / (4.0 * c * c);
    };
    auto ddg = [](double x) {
        double c = std::cos(pi * x / 4.0);
        return pi * pi * std::sin(pi * x / 4.0) / (8.0 * c * c * c);
    };
    auto inv = [](double x) { return 4.0 / pi * std::atan(x); };
    MeshMap lying("lying", g, dg, ddg, inv, MeshMapBounds{1.0, 1.2, 0.1});
    MeshMapReport report = validate_mesh_map(lying);
    CHECK_FALSE(report.ok());
}

}
