#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "gridwaves/coefficients.hpp"
#include "gridwaves/errors.hpp"
#include "gridwaves/mesh.hpp"
#include "gridwaves/solver1d.hpp"
#include "gridwaves/wave2d.hpp"

using namespace gridwaves;

namespace {
constexpr double pi = 3.14159265358979323846;

ComplexGrid test_field(const Grid2D& grid) {
    ComplexGrid u = ComplexGrid::Zero(grid.m() + 2, grid.n() + 2);
    for (int j = 1; j <= grid.m(); ++j) {
        for (int k = 1; k <= grid.n(); ++k) {
            double x = grid.axis_x.nodes[j];
            double y = grid.axis_y.nodes[k];
            u(j, k) = std::exp(Complex(-3.0 * (x * x + y * y), 2.0 * x - y));
        }
    }
    return u;
}
}

TEST_SUITE("wave2d") {

TEST_CASE("2d operator is the tensor sum of the axis operators") {
    Grid2D grid = make_grid_2d(14, 11, tan_center_map(), sin_boundary_map());
    WaveEquation2D equation(grid, unit_coefficients_2d());
    WaveEquation1D along_x(grid.axis_x, unit_coefficients());
    WaveEquation1D along_y(grid.axis_y, unit_coefficients());

    ComplexField a(grid.m() + 2), b(grid.n() + 2);
    for (int j = 0; j < grid.m() + 2; ++j)
        a[j] = std::exp(Complex(-2.0 * std::pow(grid.axis_x.nodes[j], 2), 1.3 * j));
    for (int k = 0; k < grid.n() + 2; ++k)
        b[k] = std::exp(Complex(-1.0 * std::pow(grid.axis_y.nodes[k], 2), -0.4 * k));
    a.front() = a.back() = b.front() = b.back() = 0.0;

    ComplexGrid u = ComplexGrid::Zero(grid.m() + 2, grid.n() + 2);
    for (int j = 0; j < grid.m() + 2; ++j)
        for (int k = 0; k < grid.n() + 2; ++k) u(j, k) = a[j] * b[k];

    ComplexGrid v = equation.apply(u);
    ComplexField la = along_x.apply(a);
    ComplexField lb = along_y.apply(b);
    for (int j = 1; j <= grid.m(); ++j) {
        for (int k = 1; k <= grid.n(); ++k) {
            Complex expected = la[j] * b[k] + a[j] * lb[k];
            CHECK(std::abs(v(j, k) - expected) <= 1e-11 * (1.0 + std::abs(expected)));
        }
    }
}

TEST_CASE("axis eigenvalues on the uniform mesh match the closed form") {
    TransformedGrid1D axis = transform_grid(uniform_grid(60), identity_map());
    AxisEigen eigen = eigendecompose_axis(axis);
    const double h = axis.uniform_step();
    REQUIRE(eigen.values.size() == 60);
    for (int j = 1; j <= 60; ++j) {
        double expected = 4.0 / (h * h) * std::pow(std::sin(j * pi * h / 4.0), 2);
        CHECK(eigen.values[j - 1] == doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("axis eigenvectors are weight-orthonormal and satisfy the pencil") {
    TransformedGrid1D axis = transform_grid(uniform_grid(24), tan_center_map());
    AxisEigen eigen = eigendecompose_axis(axis);
    const int n = 24;

    for (int a = 0; a < n; ++a) {
        CHECK(eigen.vectors(0, a) == 0.0);
        CHECK(eigen.vectors(n + 1, a) == 0.0);
        for (int b = 0; b < n; ++b) {
            double dot = 0.0;
            for (int j = 1; j <= n; ++j)
                dot += axis.dual[j] * eigen.vectors(j, a) * eigen.vectors(j, b);
            CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-11));
        }
        CHECK(eigen.values[a] > 0.0);
        if (a > 0) CHECK(eigen.values[a] >= eigen.values[a - 1]);
    }

    // K v = mu W v translates to apply(v) = -mu v for unit density.
    WaveEquation1D equation(axis, unit_coefficients());
    for (int a : {0, 7, 23}) {
        ComplexField v(n + 2);
        for (int j = 0; j < n + 2; ++j) v[j] = eigen.vectors(j, a);
        ComplexField lv = equation.apply(v);
        for (int j = 1; j <= n; ++j)
            CHECK(std::abs(lv[j] + eigen.values[a] * v[j]) <=
                  1e-8 * (1.0 + std::abs(eigen.values[a] * v[j])));
    }

    // sign convention: the largest entry is positive
    for (int a = 0; a < n; ++a) {
        double best = 0.0;
        for (int j = 1; j <= n; ++j)
            if (std::abs(eigen.vectors(j, a)) > std::abs(best)) best = eigen.vectors(j, a);
        CHECK(best > 0.0);
    }
}

TEST_CASE("indefinite coefficients are rejected") {
    TransformedGrid1D axis = transform_grid(uniform_grid(10), identity_map());
    CHECK_THROWS_AS(eigendecompose_axis(axis, [](double) { return -1.0; }),
                    InvalidOperatorError);
}

TEST_CASE("spectral reconstruction is exact at t = 0") {
    Grid2D grid = make_grid_2d(30, 30, tan_center_map(), tan_center_map());
    SpectralSolver2D solver(grid);
    ComplexGrid u0 = test_field(grid);
    ComplexGrid back = solver.solve(u0, 0.0);
    double worst = 0.0;
    for (int j = 0; j < u0.rows(); ++j)
        for (int k = 0; k < u0.cols(); ++k) worst = std::max(worst, std::abs(back(j, k) - u0(j, k)));
    CHECK(worst <= 1e-9);
}

TEST_CASE("modal coefficients satisfy Parseval") {
    Grid2D grid = make_grid_2d(26, 22, tan_center_map(), sin_boundary_map());
    SpectralSolver2D solver(grid);
    ComplexGrid u0 = test_field(grid);
    Eigen::MatrixXcd beta = solver.coefficients(u0);
    CHECK(beta.squaredNorm() ==
          doctest::Approx(weighted_norm2(grid, u0)).epsilon(1e-9));
    // the modal energy is conserved along the evolution
    ComplexGrid later = solver.solve(u0, 1.7);
    CHECK(weighted_norm2(grid, later) ==
          doctest::Approx(weighted_norm2(grid, u0)).epsilon(1e-9));
}

TEST_CASE("two-branch evolution reduces to one branch for matched data") {
    Grid2D grid = make_grid_2d(20, 20, tan_center_map(), tan_center_map());
    SpectralSolver2D solver(grid);
    ComplexGrid u0 = test_field(grid);
    ComplexGrid v0 = solver.time_derivative(u0, 0.0);
    ComplexGrid one = solver.solve(u0, 0.8);
    ComplexGrid two = solver.solve_two_branch(u0, v0, 0.8);
    double worst = 0.0;
    for (int j = 0; j < u0.rows(); ++j)
        for (int k = 0; k < u0.cols(); ++k) worst = std::max(worst, std::abs(one(j, k) - two(j, k)));
    CHECK(worst <= 1e-9);

    // zero velocity data evolve time-symmetrically
    ComplexGrid zero = ComplexGrid::Zero(u0.rows(), u0.cols());
    ComplexGrid forward = solver.solve_two_branch(u0, zero, 0.6);
    ComplexGrid backward = solver.solve_two_branch(u0, zero, -0.6);
    worst = 0.0;
    for (int j = 0; j < u0.rows(); ++j)
        for (int k = 0; k < u0.cols(); ++k)
            worst = std::max(worst, std::abs(forward(j, k) - backward(j, k)));
    CHECK(worst <= 1e-10);
}

TEST_CASE("leapfrog tracks the spectral solution") {
    Grid2D grid = make_grid_2d(24, 24, tan_center_map(), tan_center_map());
    SpectralSolver2D solver(grid);
    ComplexGrid u0 = gaussian_packet_2d(grid, 0.0, 0.4, pi / 4.0, pi / 4.0, 18.0);
    ComplexGrid v0 = solver.time_derivative(u0, 0.0);

    WaveEquation2D equation(grid, unit_coefficients_2d());
    const double horizon = 0.5;
    Trajectory2D traj = equation.integrate(u0, v0, horizon);
    ComplexGrid expected = solver.solve(u0, traj.final_time);

    double worst = 0.0;
    for (int j = 0; j < u0.rows(); ++j)
        for (int k = 0; k < u0.cols(); ++k)
            worst = std::max(worst, std::abs(traj.final_curr(j, k) - expected(j, k)));
    CHECK(worst <= 5e-3);

    // and conserves the half-step energy
    const double e0 = traj.energies.front();
    double drift = 0.0;
    for (double e : traj.energies) drift = std::max(drift, std::abs(e - e0));
    CHECK(drift / e0 <= 1e-11);
}

TEST_CASE("2d packet is framed by zeros and centered") {
    Grid2D grid = make_grid_2d(31, 31, tan_center_map(), tan_center_map());
    ComplexGrid u0 = gaussian_packet_2d(grid, 0.0, 0.0, pi / 2.0, pi, 25.0);
    for (int j = 0; j < u0.rows(); ++j) {
        CHECK(std::abs(u0(j, 0)) == 0.0);
        CHECK(std::abs(u0(j, u0.cols() - 1)) == 0.0);
    }
    for (int k = 0; k < u0.cols(); ++k) {
        CHECK(std::abs(u0(0, k)) == 0.0);
        CHECK(std::abs(u0(u0.rows() - 1, k)) == 0.0);
    }
    // node 16 sits exactly at the origin for 31 interior nodes
    CHECK(std::abs(u0(16, 16) - Complex(1.0, 0.0)) <= 1e-14);

    auto [cx, cy] = centroid_2d(grid, u0.cwiseAbs());
    CHECK(cx == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(cy == doctest::Approx(0.0).epsilon(1e-10));

    // wall-centered packets are allowed in 2d
    ComplexGrid wall = gaussian_packet_2d(grid, 1.0, 0.0, pi / 2.0, pi, 25.0);
    double peak = wall.cwiseAbs().maxCoeff();
    CHECK(peak > 0.0);
}

TEST_CASE("frequency symbols at marked states") {
    MeshMap tan = tan_center_map();
    auto center = lambda_symbols(tan, tan, 0.0, 0.0, pi / 2.0, pi);
    CHECK(center[0] == doctest::Approx(4.0 * std::sqrt(2.0) / pi).epsilon(1e-13));
    CHECK(center[1] == doctest::Approx(8.0 / pi).epsilon(1e-13));
    CHECK(center[2] == doctest::Approx(center[0] * center[0] + center[1] * center[1])
                           .epsilon(1e-13));

    // on the wall the axis derivative doubles, halving the symbol
    auto wall = lambda_symbols(tan, tan, 1.0, 0.0, pi / 2.0, pi);
    CHECK(wall[0] == doctest::Approx(2.0 * std::sqrt(2.0) / pi).epsilon(1e-13));
    CHECK(wall[1] == doctest::Approx(8.0 / pi).epsilon(1e-13));
}

TEST_CASE("2d rays decouple per axis") {
    MeshMap tan = tan_center_map();
    MeshMap id = identity_map();
    const double eta0 = 1.0;
    RayPath2D path = integrate_ray_2d(tan, id, 0.3, 0.2, 2.0, eta0, 3.0, 1e-3);

    // the uniform axis keeps its frequency exactly and moves at constant speed
    for (double eta : path.y_axis.xi) CHECK(eta == eta0);
    const double slope = -std::sin(eta0) / path.r0;
    for (size_t k = 0; k + 1 < path.y_axis.t.size(); k += 50) {
        double dt = path.y_axis.t[k + 1] - path.y_axis.t[k];
        if (dt <= 0.0 || !path.y_axis.reflections.empty()) break;
        double rate = (path.y_axis.x[k + 1] - path.y_axis.x[k]) / dt;
        CHECK(rate == doctest::Approx(slope).epsilon(1e-10));
    }

    // r1, r2 are consistent with the initial frequency symbols
    auto symbols = lambda_symbols(tan, id, 0.3, 0.2, 2.0, eta0);
    CHECK(path.r0 == doctest::Approx(std::sqrt(symbols[2])).epsilon(1e-13));
    CHECK(path.r1 == doctest::Approx(std::abs(symbols[0])).epsilon(1e-13));
    CHECK(path.r2 == doctest::Approx(std::abs(symbols[1])).epsilon(1e-13));
}

TEST_CASE("degenerate 2d rays are rejected") {
    MeshMap tan = tan_center_map();
    CHECK_THROWS_AS(integrate_ray_2d(tan, tan, 0.0, 0.0, 0.0, 0.0, 1.0), DegenerateRayError);
}

TEST_CASE("trap period approaches the linearized period") {
    MeshMap tan = tan_center_map();
    const double r0 = 2.0;
    // linearization at the center has frequency 8 sqrt(2) / (pi r0)
    const double expected = pi * pi * r0 / (4.0 * std::sqrt(2.0));
    // the amplitude correction is quadratic in the frequency offset, so the
    // deficit shrinks fourfold per halving; offsets below ~4e-3 leave this
    // regime because cancellation noise at the turning point (the 1 - ratio^2
    // radicand is formed from nearly equal g' values) floors around 1e-4
    // relative, so the limit is probed from the clean side
    std::vector<double> deficits;
    for (double offset : {3.2e-2, 1.6e-2, 8e-3}) {
        const double xi0 = pi - offset;
        const double r_axis = 2.0 * std::sin(xi0 / 2.0) / tan.deriv(0.0);
        deficits.push_back(std::abs(trap_period(tan, r0, r_axis, 0.0, xi0) - expected));
    }
    CHECK(deficits.back() / expected <= 2e-5);
    CHECK(deficits[0] / deficits[1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(deficits[1] / deficits[2] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("trap period regression value") {
    MeshMap tan = tan_center_map();
    // state of the trapped-orbit family: x0 = 0, xi0 = pi/2, eta0 = 5 pi/6
    auto symbols = lambda_symbols(tan, tan, 0.0, 0.0, pi / 2.0, 5.0 * pi / 6.0);
    double period = trap_period(tan, std::sqrt(symbols[2]), std::abs(symbols[0]), 0.0, pi / 2.0);
    CHECK(period == doctest::Approx(9.3021769104438601).epsilon(1e-10));
}

TEST_CASE("untrappable configurations are reported") {
    CHECK_THROWS_AS(trap_period(identity_map(), 2.0, 1.0, 0.0, pi / 2.0), NotTrappedError);
    CHECK_THROWS_AS(trap_period(sin_boundary_map(), 2.0, 1.0, 0.0, pi / 2.0), NotTrappedError);
    // the stationary state has no oscillation to time
    CHECK_THROWS_AS(trap_period(tan_center_map(), 2.0, 1.0, 0.0, pi), NotTrappedError);
}

}
