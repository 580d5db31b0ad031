#include "gridwaves/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

namespace gridwaves {

namespace {

constexpr double pi = 3.14159265358979323846;

}

MeshMap::MeshMap(std::string name, Fn g, Fn dg, Fn ddg, Fn inverse, MeshMapBounds bounds)
    : name_(std::move(name)),
      g_(std::move(g)),
      dg_(std::move(dg)),
      ddg_(std::move(ddg)),
      ginv_(std::move(inverse)),
      bounds_(bounds) {
    if (!g_ || !dg_ || !ddg_ || !ginv_)
        throw std::invalid_argument("MeshMap: all four callables must be set");
    if (!(bounds_.deriv_lower > 0.0) || !(bounds_.deriv_upper >= bounds_.deriv_lower))
        throw std::invalid_argument("MeshMap: derivative bounds must satisfy 0 < lower <= upper");
}

MeshMap identity_map() {
    return MeshMap(
        "identity",
        [](double x) { return x; },
        [](double) { return 1.0; },
        [](double) { return 0.0; },
        [](double x) { return x; },
        MeshMapBounds{1.0, 1.0, 0.0});
}

MeshMap tan_center_map() {
    // g' = (pi/4) sec^2(pi x/4) ranges over [pi/4, pi/2];
    // g'' = (pi^2/8) sec^2(pi x/4) tan(pi x/4), |g''| <= pi^2/4.
    return MeshMap(
        "tan_center",
        [](double x) { return std::tan(pi * x / 4.0); },
        [](double x) {
            double c = std::cos(pi * x / 4.0);
            return pi / (4.0 * c * c);
        },
        [](double x) {
            double c = std::cos(pi * x / 4.0);
            return pi * pi / 8.0 * std::tan(pi * x / 4.0) / (c * c);
        },
        [](double x) { return 4.0 / pi * std::atan(x); },
        MeshMapBounds{pi / 4.0, pi / 2.0, pi * pi / 4.0});
}

MeshMap sin_boundary_map() {
    // g' = (pi/3) cos(pi x/6) ranges over [pi sqrt(3)/6, pi/3];
    // |g''| = (pi^2/18)|sin(pi x/6)| <= pi^2/36.
    return MeshMap(
        "sin_boundary",
        [](double x) { return 2.0 * std::sin(pi * x / 6.0); },
        [](double x) { return pi / 3.0 * std::cos(pi * x / 6.0); },
        [](double x) { return -pi * pi / 18.0 * std::sin(pi * x / 6.0); },
        [](double x) { return 6.0 / pi * std::asin(x / 2.0); },
        MeshMapBounds{pi * std::sqrt(3.0) / 6.0, pi / 3.0, pi * pi / 36.0});
}

std::vector<MeshMap> builtin_maps() {
    return {identity_map(), tan_center_map(), sin_boundary_map()};
}

MeshMap mesh_map_by_name(const std::string& id) {
    if (id == "identity") return identity_map();
    if (id == "tan_center") return tan_center_map();
    if (id == "sin_boundary") return sin_boundary_map();
    throw std::invalid_argument("unknown mesh map id: " + id);
}

Grid1D uniform_grid(int n_interior) {
    if (n_interior < 1)
        throw std::invalid_argument("uniform_grid: need at least one interior node");
    Grid1D grid;
    grid.n_interior = n_interior;
    grid.step = 2.0 / (n_interior + 1);
    grid.nodes.resize(n_interior + 2);
    for (int j = 0; j <= n_interior + 1; ++j)
        grid.nodes[j] = -1.0 + j * grid.step;
    grid.nodes.front() = -1.0;
    grid.nodes.back() = 1.0;
    return grid;
}

TransformedGrid1D transform_grid(const Grid1D& grid, const MeshMap& map) {
    if (grid.nodes.size() != static_cast<size_t>(grid.n_interior) + 2)
        throw std::invalid_argument("transform_grid: malformed source grid");

    TransformedGrid1D out{grid, map, {}, {}, {}, {}};
    const int n = grid.n_interior;
    out.nodes.resize(n + 2);
    for (int j = 0; j <= n + 1; ++j)
        out.nodes[j] = map(grid.nodes[j]);

    out.midpoints.resize(n + 1);
    out.cell.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        out.midpoints[i] = map(0.5 * (grid.nodes[i] + grid.nodes[i + 1]));
        out.cell[i] = out.nodes[i + 1] - out.nodes[i];
        if (!(out.cell[i] > 0.0)) {
            std::ostringstream msg;
            msg << "transform_grid: map '" << map.name() << "' is not strictly increasing"
                << " across cell " << i;
            throw InvalidMeshError(msg.str());
        }
    }

    out.dual.resize(n + 2);
    out.dual[0] = 0.5 * out.cell[0];
    out.dual[n + 1] = 0.5 * out.cell[n];
    for (int j = 1; j <= n; ++j)
        out.dual[j] = 0.5 * (out.cell[j - 1] + out.cell[j]);
    return out;
}

MeshMapReport validate_mesh_map(const MeshMap& map, int samples) {
    if (samples < 2)
        throw std::invalid_argument("validate_mesh_map: need at least two samples");

    MeshMapReport report;
    report.samples = samples;
    report.min_deriv = std::numeric_limits<double>::infinity();
    report.max_deriv = 0.0;
    report.max_second = 0.0;
    report.max_inverse_residual = 0.0;
    report.monotone = true;

    const double step = 2.0 / (samples - 1);
    double prev_value = 0.0;
    for (int i = 0; i < samples; ++i) {
        double x = (i == samples - 1) ? 1.0 : -1.0 + i * step;
        double value = map(x);
        double deriv = map.deriv(x);
        double second = std::abs(map.second_deriv(x));

        if (i > 0 && !(value > prev_value)) report.monotone = false;
        prev_value = value;

        report.min_deriv = std::min(report.min_deriv, deriv);
        report.max_deriv = std::max(report.max_deriv, deriv);
        report.max_second = std::max(report.max_second, second);
        report.max_inverse_residual =
            std::max(report.max_inverse_residual, std::abs(map.inverse(value) - x));
    }
    report.endpoint_residual_left = std::abs(map(-1.0) + 1.0);
    report.endpoint_residual_right = std::abs(map(1.0) - 1.0);

    const MeshMapBounds& bounds = map.bounds();
    const double slack = 1e-9;
    auto flag = [&report](const std::string& text) { report.violations.push_back(text); };

    if (!report.monotone) flag("map is not strictly increasing on the sample grid");
    if (report.endpoint_residual_left > 1e-12) flag("g(-1) != -1");
    if (report.endpoint_residual_right > 1e-12) flag("g(1) != 1");
    if (report.min_deriv < bounds.deriv_lower * (1.0 - slack))
        flag("derivative drops below the declared lower bound");
    if (report.min_deriv <= 0.0) flag("derivative is not positive");
    if (report.max_deriv > bounds.deriv_upper * (1.0 + slack))
        flag("derivative exceeds the declared upper bound");
    if (report.max_second > bounds.second_upper * (1.0 + slack) + slack)
        flag("second derivative exceeds the declared bound");
    if (report.max_inverse_residual > 1e-10)
        flag("inverse does not round-trip to 1e-10");
    return report;
}

}
