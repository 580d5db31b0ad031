#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "gridwaves/coefficients.hpp"
#include "gridwaves/errors.hpp"
#include "gridwaves/mesh.hpp"
#include "gridwaves/solver1d.hpp"

using namespace gridwaves;

namespace {
constexpr double pi = 3.14159265358979323846;

ComplexField zeros(size_t n) { return ComplexField(n, Complex(0.0, 0.0)); }
}

TEST_SUITE("solver1d") {

TEST_CASE("flux operator reproduces the uniform second difference") {
    TransformedGrid1D grid = transform_grid(uniform_grid(9), identity_map());
    WaveEquation1D equation(grid, unit_coefficients());
    const double h = grid.uniform_step();

    ComplexField spike = zeros(11);
    spike[5] = 1.0;
    ComplexField v = equation.apply(spike);
    CHECK(v[5].real() == doctest::Approx(-2.0 / (h * h)).epsilon(1e-12));
    CHECK(v[4].real() == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
    CHECK(v[6].real() == doctest::Approx(1.0 / (h * h)).epsilon(1e-12));
    CHECK(std::abs(v[3]) == 0.0);
    CHECK(std::abs(v[0]) == 0.0);
    CHECK(std::abs(v[10]) == 0.0);
}

TEST_CASE("affine fields are annihilated on any mesh") {
    for (const MeshMap& map : builtin_maps()) {
        TransformedGrid1D grid = transform_grid(uniform_grid(33), map);
        WaveEquation1D equation(grid, unit_coefficients());
        ComplexField u(grid.nodes.size());
        for (size_t j = 0; j < grid.nodes.size(); ++j)
            u[j] = Complex(0.25 - 1.7 * grid.nodes[j], 0.0);
        ComplexField v = equation.apply(u);
        CAPTURE(map.name());
        for (size_t j = 1; j + 1 < u.size(); ++j) CHECK(std::abs(v[j]) <= 1e-11);
    }
}

TEST_CASE("first Dirichlet mode is an eigenvector on the uniform mesh") {
    const int n = 40;
    TransformedGrid1D grid = transform_grid(uniform_grid(n), identity_map());
    WaveEquation1D equation(grid, unit_coefficients());
    const double h = grid.uniform_step();
    const double mu = 4.0 / (h * h) * std::pow(std::sin(pi * h / 4.0), 2);

    ComplexField mode(grid.nodes.size());
    for (int j = 0; j < static_cast<int>(mode.size()); ++j)
        mode[j] = std::sin(j * pi / (n + 1.0));
    ComplexField v = equation.apply(mode);
    for (size_t j = 1; j + 1 < mode.size(); ++j)
        CHECK(v[j].real() == doctest::Approx(-mu * mode[j].real()).epsilon(1e-10));
}

TEST_CASE("single mode oscillates at the discrete frequency") {
    const int n = 50;
    TransformedGrid1D grid = transform_grid(uniform_grid(n), identity_map());
    WaveEquation1D equation(grid, unit_coefficients());
    const double h = grid.uniform_step();
    const double mu = 4.0 / (h * h) * std::pow(std::sin(pi * h / 4.0), 2);

    ComplexField mode(grid.nodes.size());
    for (int j = 0; j < static_cast<int>(mode.size()); ++j)
        mode[j] = std::sin(j * pi / (n + 1.0));

    const double horizon = 1.0;
    Trajectory1D traj = equation.integrate(mode, zeros(mode.size()), horizon);
    const double expected = std::cos(std::sqrt(mu) * horizon);
    for (size_t j = 1; j + 1 < mode.size(); ++j) {
        CHECK(traj.final_curr[j].real() ==
              doctest::Approx(expected * mode[j].real()).epsilon(1e-3));
    }
}

TEST_CASE("leapfrog lands exactly on the horizon") {
    TransformedGrid1D grid = transform_grid(uniform_grid(30), tan_center_map());
    WaveEquation1D equation(grid, unit_coefficients());
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.0, pi / 4.0, 0.0});
    Trajectory1D traj = equation.integrate(u0, v0, 0.7);
    CHECK(traj.final_time == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(traj.times.back() == doctest::Approx(0.7).epsilon(1e-15));
    long n_steps = std::lround(0.7 / traj.dt);
    CHECK(n_steps * traj.dt == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(traj.energy_times.size() == static_cast<size_t>(n_steps));
    CHECK(traj.energy_times.front() == doctest::Approx(0.5 * traj.dt).epsilon(1e-14));
}

TEST_CASE("half-step energy is conserved to roundoff") {
    TransformedGrid1D grid = transform_grid(uniform_grid(150), tan_center_map());
    WaveEquation1D equation(grid, oscillatory_sigma(1.0, 2));
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.2, pi / 3.0, 0.0});
    Trajectory1D traj = equation.integrate(u0, v0, 2.0);
    REQUIRE(!traj.energies.empty());
    const double e0 = traj.energies.front();
    CHECK(e0 > 0.0);
    double drift = 0.0;
    for (double e : traj.energies) drift = std::max(drift, std::abs(e - e0));
    CHECK(drift / e0 <= 1e-11);
}

TEST_CASE("energy cross form approximates the rate form") {
    TransformedGrid1D grid = transform_grid(uniform_grid(100), identity_map());
    WaveEquation1D equation(grid, unit_coefficients());
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.0, pi / 4.0, 0.0});
    Trajectory1D traj = equation.integrate(u0, v0, 0.5);
    const double analytic = equation.energy_rate_form(u0, v0);
    CHECK(traj.energies.front() == doctest::Approx(analytic).epsilon(1e-3));
}

TEST_CASE("the scheme is linear") {
    TransformedGrid1D grid = transform_grid(uniform_grid(30), sin_boundary_map());
    WaveEquation1D equation(grid, unit_coefficients());
    auto [a0, a1] = gaussian_packet(grid, PacketSpec{0.1, pi / 2.0, 0.0});
    auto [b0, b1] = gaussian_packet(grid, PacketSpec{-0.3, pi / 5.0, 0.0});
    const Complex alpha(2.0, 0.0), beta(-0.5, 0.5);

    ComplexField c0(a0.size()), c1(a0.size());
    for (size_t j = 0; j < a0.size(); ++j) {
        c0[j] = alpha * a0[j] + beta * b0[j];
        c1[j] = alpha * a1[j] + beta * b1[j];
    }
    const double horizon = 0.5;
    Trajectory1D ta = equation.integrate(a0, a1, horizon);
    Trajectory1D tb = equation.integrate(b0, b1, horizon);
    Trajectory1D tc = equation.integrate(c0, c1, horizon);
    for (size_t j = 0; j < a0.size(); ++j) {
        Complex combined = alpha * ta.final_curr[j] + beta * tb.final_curr[j];
        CHECK(std::abs(tc.final_curr[j] - combined) <= 1e-10);
    }
}

TEST_CASE("unstable time steps are reported") {
    TransformedGrid1D grid = transform_grid(uniform_grid(60), identity_map());
    WaveEquation1D equation(grid, unit_coefficients());
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.0, pi / 2.0, 0.0});
    LeapfrogOptions options;
    options.cfl = 3.0;
    CHECK_THROWS_AS(equation.integrate(u0, v0, 5.0, options), InstabilityError);
}

TEST_CASE("gaussian packet matches its formula") {
    const int n = 99;
    TransformedGrid1D grid = transform_grid(uniform_grid(n), identity_map());
    const double h = grid.uniform_step();
    const double xi0 = pi / 2.0;
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.0, xi0, 0.0});

    // default concentration h^{-0.9}; for h = 0.02 that is about 33.81
    const double gamma = std::pow(h, -0.9);
    CHECK(gamma == doctest::Approx(33.8119).epsilon(1e-4));

    CHECK(std::abs(u0.front()) == 0.0);
    CHECK(std::abs(u0.back()) == 0.0);
    CHECK(std::abs(v0.front()) == 0.0);
    CHECK(std::abs(v0.back()) == 0.0);

    // interior samples agree with the closed form on the identity map
    for (int j : {20, 50, 77}) {
        double y = grid.source.nodes[j];
        Complex expected = std::exp(Complex(-0.5 * gamma * y * y, xi0 * y / h));
        CHECK(std::abs(u0[j] - expected) <= 1e-13);
        Complex expected_v = expected * Complex(-gamma * y, xi0 / h);
        CHECK(std::abs(v0[j] - expected_v) <= 1e-9);
    }

    // modulus peaks at the center node
    size_t argmax = 0;
    for (size_t j = 0; j < u0.size(); ++j)
        if (std::abs(u0[j]) > std::abs(u0[argmax])) argmax = j;
    CHECK(argmax == 50);
}

TEST_CASE("packet centers must be strictly interior") {
    TransformedGrid1D grid = transform_grid(uniform_grid(20), identity_map());
    CHECK_THROWS_AS(gaussian_packet(grid, PacketSpec{1.0, pi, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_packet(grid, PacketSpec{-1.2, pi, 0.0}), std::invalid_argument);
}

TEST_CASE("centroid of a symmetric packet sits at its center") {
    TransformedGrid1D grid = transform_grid(uniform_grid(99), identity_map());
    auto [u0, v0] = gaussian_packet(grid, PacketSpec{0.3, pi / 2.0, 0.0});
    CHECK(centroid(grid, u0) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("centroid of nothing is undefined") {
    TransformedGrid1D grid = transform_grid(uniform_grid(20), identity_map());
    CHECK_THROWS_AS(centroid(grid, zeros(22)), UndefinedCentroidError);
}

TEST_CASE("d'Alembert reference translates a right-mover") {
    auto u0 = [](double x) { return std::exp(Complex(-40.0 * x * x, 12.0 * x)); };
    auto u1 = [&](double x) { return -u0(x) * Complex(-80.0 * x, 12.0); };

    for (double t : {0.1, 0.3}) {
        for (double x : {-0.2, 0.0, 0.15}) {
            Complex reference = dalembert_reference(u0, u1, x, t);
            CHECK(std::abs(reference - u0(x - t)) <= 1e-8);
        }
    }
}

TEST_CASE("d'Alembert reference halves even data") {
    auto u0 = [](double x) { return Complex(std::exp(-30.0 * x * x), 0.0); };
    auto u1 = [](double) { return Complex(0.0, 0.0); };
    Complex v = dalembert_reference(u0, u1, 0.1, 0.2);
    Complex expected = 0.5 * (u0(0.3) + u0(-0.1));
    CHECK(std::abs(v - expected) <= 1e-12);
}

TEST_CASE("d'Alembert reference guards its domain of validity") {
    auto u0 = [](double) { return Complex(1.0, 0.0); };
    auto u1 = [](double) { return Complex(0.0, 0.0); };
    CHECK_THROWS_AS(dalembert_reference(u0, u1, 0.8, 0.5), OutOfValidityError);
    CHECK_THROWS_AS(dalembert_reference(u0, u1, -0.8, 0.5), OutOfValidityError);
    CHECK_THROWS_AS(dalembert_reference(u0, u1, 0.0, -0.1), std::invalid_argument);
}

}
