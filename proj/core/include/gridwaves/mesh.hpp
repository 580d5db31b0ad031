#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gridwaves/errors.hpp"

namespace gridwaves {

/// Certified bounds for a mesh map g on [-1,1]:
/// 0 < deriv_lower <= |g'| <= deriv_upper and |g''| <= second_upper.
struct MeshMapBounds {
    double deriv_lower = 1.0;
    double deriv_upper = 1.0;
    double second_upper = 0.0;
};

/// Smooth increasing diffeomorphism g of [-1,1] onto itself, bundled with its
/// first two derivatives, its inverse, and declared derivative bounds.
class MeshMap {
public:
    using Fn = std::function<double(double)>;

    MeshMap(std::string name, Fn g, Fn dg, Fn ddg, Fn inverse, MeshMapBounds bounds);

    double operator()(double x) const { return g_(x); }
    double deriv(double x) const { return dg_(x); }
    double second_deriv(double x) const { return ddg_(x); }
    double inverse(double x) const { return ginv_(x); }

    const MeshMapBounds& bounds() const { return bounds_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn g_, dg_, ddg_, ginv_;
    MeshMapBounds bounds_;
};

/// g(x) = x.
MeshMap identity_map();
/// g(x) = tan(pi x / 4): cells cluster near the center of the interval.
MeshMap tan_center_map();
/// g(x) = 2 sin(pi x / 6): cells cluster near the endpoints.
MeshMap sin_boundary_map();

/// The three maps above, in the order identity, tan_center, sin_boundary.
std::vector<MeshMap> builtin_maps();

/// Lookup by id "identity" | "tan_center" | "sin_boundary".
/// Throws std::invalid_argument for unknown ids.
MeshMap mesh_map_by_name(const std::string& id);

/// Uniform grid on [-1,1] with n interior nodes: x_j = -1 + j h, h = 2/(n+1),
/// j = 0..n+1 including both endpoints.
struct Grid1D {
    int n_interior = 0;
    double step = 0.0;
    std::vector<double> nodes;
};

/// Throws std::invalid_argument unless n >= 1.
Grid1D uniform_grid(int n_interior);

/// Image of a uniform grid under a mesh map, with the derived cell geometry:
///   nodes[j]     = g(x_j),                      j = 0..n+1
///   midpoints[i] = g((x_i + x_{i+1})/2),        i = 0..n
///   cell[i]      = nodes[i+1] - nodes[i]        (h_{i+1/2})
///   dual[j]      = (cell[j-1] + cell[j]) / 2    for interior j; half cells at
///                  the two ends.
struct TransformedGrid1D {
    Grid1D source;
    MeshMap map;
    std::vector<double> nodes;
    std::vector<double> midpoints;
    std::vector<double> cell;
    std::vector<double> dual;

    int n_interior() const { return source.n_interior; }
    double uniform_step() const { return source.step; }
};

/// Throws InvalidMeshError if the mapped nodes are not strictly increasing.
TransformedGrid1D transform_grid(const Grid1D& grid, const MeshMap& map);

/// Dense-sampling certificate for a mesh map against its declared bounds.
struct MeshMapReport {
    int samples = 0;
    double min_deriv = 0.0;
    double max_deriv = 0.0;
    double max_second = 0.0;
    double endpoint_residual_left = 0.0;
    double endpoint_residual_right = 0.0;
    double max_inverse_residual = 0.0;
    bool monotone = false;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Samples g, g', g'' on a uniform grid of `samples` points including the
/// endpoints and checks: g(-1) = -1, g(1) = 1, strict monotonicity, declared
/// derivative bounds, and g_inv(g(x)) = x round trips.
MeshMapReport validate_mesh_map(const MeshMap& map, int samples = 10000);

}
