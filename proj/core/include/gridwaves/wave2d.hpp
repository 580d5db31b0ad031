#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "gridwaves/mesh.hpp"
#include "gridwaves/rays.hpp"
#include "gridwaves/solver1d.hpp"

namespace gridwaves {

using ComplexGrid = Eigen::MatrixXcd;
using RealGrid = Eigen::MatrixXd;

/// Tensor product of two transformed axes; fields are stored as
/// (m+2) x (n+2) matrices with row index along x and column index along y.
struct Grid2D {
    TransformedGrid1D axis_x;
    TransformedGrid1D axis_y;

    int m() const { return axis_x.n_interior(); }
    int n() const { return axis_y.n_interior(); }
};

Grid2D make_grid_2d(int m_interior, int n_interior, const MeshMap& map_x, const MeshMap& map_y);

struct Coefficient2D {
    std::function<double(double, double)> rho;
    std::function<double(double, double)> sigma;
    bool constant_one = false;
};

Coefficient2D unit_coefficients_2d();

struct Trajectory2D {
    std::vector<double> times;
    std::vector<RealGrid> modulus;
    std::vector<std::pair<double, double>> centroids;
    std::vector<double> energy_times;
    std::vector<double> energies;
    double dt = 0.0;
    double final_time = 0.0;
    ComplexGrid final_curr;
    ComplexGrid final_prev;
};

/// Five-point scheme rho h^x_j h^y_k u'' = flux differences on the tensor
/// grid, advanced by leapfrog with homogeneous Dirichlet walls.
class WaveEquation2D {
public:
    WaveEquation2D(Grid2D grid, Coefficient2D coefficients);

    const Grid2D& grid() const { return grid_; }

    ComplexGrid apply(const ComplexGrid& u) const;

    /// dt = cfl min(h_x, h_y) shortened to land exactly on the horizon.
    Trajectory2D integrate(const ComplexGrid& u0, const ComplexGrid& v0, double horizon,
                           const LeapfrogOptions& options = {}) const;

    /// Leapfrog-conserved half-step energy (cross flux form), the 2D analogue
    /// of WaveEquation1D::energy.
    double energy(const ComplexGrid& u_curr, const ComplexGrid& u_prev, double dt) const;

    /// Same quadratic form with an analytic velocity.
    double energy_rate_form(const ComplexGrid& u, const ComplexGrid& du_dt) const;

private:
    Grid2D grid_;
    Coefficient2D coeffs_;
    RealGrid flux_x_;      // sigma(midx_i, y_k) / cellx_i, (m+1) x (n+2)
    RealGrid flux_y_;      // sigma(x_j, midy_i) / celly_i, (m+2) x (n+1)
    RealGrid mass_;        // dualx_j dualy_k rho(x_j, y_k)
    RealGrid inv_mass_;    // reciprocal on the interior, 0 on the frame
};

/// Eigenpairs of the 1D flux operator on one axis against the dual-cell
/// weights: K v = mu W v with W = diag(dual_j). `values` ascend and are
/// positive; `vectors` carries W-orthonormal columns with zero boundary rows.
/// Throws InvalidOperatorError if the symmetrized matrix is not positive
/// definite.
struct AxisEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
    Eigen::VectorXd weights;
};

AxisEigen eigendecompose_axis(const TransformedGrid1D& axis,
                              const std::function<double(double)>& sigma = {});

struct SpectralBasis2D {
    AxisEigen x;
    AxisEigen y;
};

SpectralBasis2D build_spectral_basis(const Grid2D& grid);

/// Separated-variables solution of the constant-coefficient scheme:
/// u(t) = sum_{j,k} beta_{j,k} Psi_j Ups_k exp(i t sqrt(mu_j + nu_k)).
class SpectralSolver2D {
public:
    explicit SpectralSolver2D(Grid2D grid);

    const Grid2D& grid() const { return grid_; }
    const SpectralBasis2D& basis() const { return basis_; }

    /// Modal coefficients beta = Psi^T W_x u0 W_y Ups of the interior field.
    Eigen::MatrixXcd coefficients(const ComplexGrid& u0) const;

    /// Single upper-branch evolution of the datum u0.
    ComplexGrid solve(const ComplexGrid& u0, double t) const;

    /// Analytic time derivative of solve(u0, .) at time t.
    ComplexGrid time_derivative(const ComplexGrid& u0, double t) const;

    /// Two-branch evolution matching both u(0) = u0 and u_t(0) = u1.
    ComplexGrid solve_two_branch(const ComplexGrid& u0, const ComplexGrid& u1, double t) const;

private:
    Grid2D grid_;
    SpectralBasis2D basis_;
    ComplexGrid assemble(const Eigen::MatrixXcd& modal) const;
};

/// Squared weighted norm sum dualx_j dualy_k |u_{jk}|^2 over the interior.
double weighted_norm2(const Grid2D& grid, const ComplexGrid& u);

/// Gaussian packet evaluated verbatim at the physical nodes:
/// exp(-gamma ((X_j - x0)^2 + (Y_k - y0)^2)) exp(i (X_j xi0/h_x + Y_k eta0/h_y))
/// with a zeroed boundary frame. Centers may sit on the closed square.
ComplexGrid gaussian_packet_2d(const Grid2D& grid, double x0, double y0, double xi0, double eta0,
                               double gamma);

/// Frequency symbols at a physical position: lambda_1 = 2 sin(xi/2) / g_x'(y),
/// lambda_2 likewise, Lambda = lambda_1^2 + lambda_2^2.
std::array<double, 3> lambda_symbols(const MeshMap& map_x, const MeshMap& map_y, double x,
                                     double y, double xi, double eta);

/// Mass-weighted centroid of a modulus field; throws UndefinedCentroidError
/// on zero mass.
std::pair<double, double> centroid_2d(const Grid2D& grid, const RealGrid& modulus);

struct RayPath2D {
    RayPath x_axis;
    RayPath y_axis;
    double r0 = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

/// Per-axis bi-characteristics in physical variables, time-normalized by the
/// conserved r0 = sqrt(Lambda) of the initial state:
///   x' = -s sin(xi) / (r0 g_x'(y)),  xi' = -s 4 sin^2(xi/2) g_x''(y) / (r0 g_x'(y)^3)
/// (y the reference preimage of x), and likewise for the second axis. Wall
/// reflections flip the axis frequency. Throws DegenerateRayError when the
/// initial Lambda vanishes.
RayPath2D integrate_ray_2d(const MeshMap& map_x, const MeshMap& map_y, double x0, double y0,
                           double xi0, double eta0, double horizon, double dt = 1e-3,
                           Branch branch = Branch::plus);

/// Closed-form period of a trapped axis oscillation:
///   T = (2 r0 / r_axis) integral_{-y*}^{y*} g'(z) / sqrt(1 - (g'(z)/g'(y*))^2) dz
/// where the turning point y* in (0,1] solves g'(y*) = g'(y0)/sin(xi0/2) and
/// positions are physical. The square-root singularity is removed by the
/// substitution z = y* sin(theta) and the integral evaluated by a composite
/// Gauss rule refined to 1e-8. Throws NotTrappedError when no turning point
/// exists inside (0,1].
double trap_period(const MeshMap& map, double r0, double r_axis, double x0, double xi0);

}
