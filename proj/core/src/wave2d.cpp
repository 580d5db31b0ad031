#include "gridwaves/wave2d.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridwaves/errors.hpp"

namespace gridwaves {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

}

Grid2D make_grid_2d(int m_interior, int n_interior, const MeshMap& map_x, const MeshMap& map_y) {
    return Grid2D{transform_grid(uniform_grid(m_interior), map_x),
                  transform_grid(uniform_grid(n_interior), map_y)};
}

Coefficient2D unit_coefficients_2d() {
    return Coefficient2D{[](double, double) { return 1.0; },
                         [](double, double) { return 1.0; }, true};
}

WaveEquation2D::WaveEquation2D(Grid2D grid, Coefficient2D coefficients)
    : grid_(std::move(grid)), coeffs_(std::move(coefficients)) {
    if (!coeffs_.rho || !coeffs_.sigma)
        throw std::invalid_argument("WaveEquation2D: coefficient callables must be set");
    const int m = grid_.m();
    const int n = grid_.n();
    const auto& ax = grid_.axis_x;
    const auto& ay = grid_.axis_y;

    flux_x_ = RealGrid::Zero(m + 1, n + 2);
    for (int i = 0; i <= m; ++i)
        for (int k = 1; k <= n; ++k)
            flux_x_(i, k) = coeffs_.sigma(ax.midpoints[i], ay.nodes[k]) / ax.cell[i];

    flux_y_ = RealGrid::Zero(m + 2, n + 1);
    for (int j = 1; j <= m; ++j)
        for (int i = 0; i <= n; ++i)
            flux_y_(j, i) = coeffs_.sigma(ax.nodes[j], ay.midpoints[i]) / ay.cell[i];

    mass_ = RealGrid::Zero(m + 2, n + 2);
    inv_mass_ = RealGrid::Zero(m + 2, n + 2);
    for (int j = 1; j <= m; ++j) {
        for (int k = 1; k <= n; ++k) {
            mass_(j, k) = ax.dual[j] * ay.dual[k] * coeffs_.rho(ax.nodes[j], ay.nodes[k]);
            inv_mass_(j, k) = 1.0 / mass_(j, k);
        }
    }
}

ComplexGrid WaveEquation2D::apply(const ComplexGrid& u) const {
    const int m = grid_.m();
    const int n = grid_.n();
    if (u.rows() != m + 2 || u.cols() != n + 2)
        throw std::invalid_argument("apply: field must be (m+2) x (n+2)");

    const auto& ax = grid_.axis_x;
    const auto& ay = grid_.axis_y;
    ComplexGrid v = ComplexGrid::Zero(m + 2, n + 2);
    for (int j = 1; j <= m; ++j) {
        for (int k = 1; k <= n; ++k) {
            Complex fx = flux_x_(j, k) * (u(j + 1, k) - u(j, k)) -
                         flux_x_(j - 1, k) * (u(j, k) - u(j - 1, k));
            Complex fy = flux_y_(j, k) * (u(j, k + 1) - u(j, k)) -
                         flux_y_(j, k - 1) * (u(j, k) - u(j, k - 1));
            v(j, k) = (ay.dual[k] * fx + ax.dual[j] * fy) * inv_mass_(j, k);
        }
    }
    return v;
}

Trajectory2D WaveEquation2D::integrate(const ComplexGrid& u0, const ComplexGrid& v0,
                                       double horizon, const LeapfrogOptions& options) const {
    const int m = grid_.m();
    const int n = grid_.n();
    if (u0.rows() != m + 2 || u0.cols() != n + 2 || v0.rows() != m + 2 || v0.cols() != n + 2)
        throw std::invalid_argument("integrate: data must be (m+2) x (n+2)");
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    if (!(options.cfl > 0.0)) throw std::invalid_argument("integrate: cfl must be positive");

    const double dt_base =
        options.cfl * std::min(grid_.axis_x.uniform_step(), grid_.axis_y.uniform_step());
    const int n_steps = std::max(1, static_cast<int>(std::ceil(horizon / dt_base - 1e-9)));
    const double dt = horizon / n_steps;
    const int stride = options.stride > 0 ? options.stride : std::max(1, n_steps / 512);

    Trajectory2D record;
    record.dt = dt;

    const double reference_amp = u0.cwiseAbs().maxCoeff();
    const double blowup = options.blowup_factor * std::max(reference_amp, 1e-300);

    auto snapshot = [&](int step, const ComplexGrid& u) {
        record.times.push_back(step * dt);
        RealGrid modulus = u.cwiseAbs();
        record.centroids.push_back(centroid_2d(grid_, modulus));
        record.modulus.push_back(std::move(modulus));
    };

    ComplexGrid u_prev = u0;
    ComplexGrid u_curr = u0 + dt * v0 + (0.5 * dt * dt) * apply(u0);

    snapshot(0, u_prev);
    record.energy_times.push_back(0.5 * dt);
    record.energies.push_back(energy(u_curr, u_prev, dt));
    if (1 % stride == 0 || n_steps == 1) snapshot(1, u_curr);

    for (int step = 2; step <= n_steps; ++step) {
        ComplexGrid u_next = 2.0 * u_curr - u_prev + (dt * dt) * apply(u_curr);
        u_prev.swap(u_curr);
        u_curr.swap(u_next);

        if (u_curr.cwiseAbs().maxCoeff() > blowup) {
            std::ostringstream msg;
            msg << "leapfrog unstable: amplitude exceeded " << options.blowup_factor
                << " x initial at step " << step << " (t = " << step * dt << ")";
            throw InstabilityError(step, msg.str());
        }

        record.energy_times.push_back((step - 0.5) * dt);
        record.energies.push_back(energy(u_curr, u_prev, dt));
        if (step % stride == 0 || step == n_steps) snapshot(step, u_curr);
    }

    record.final_time = n_steps * dt;
    record.final_curr = std::move(u_curr);
    record.final_prev = std::move(u_prev);
    return record;
}

double WaveEquation2D::energy(const ComplexGrid& u_curr, const ComplexGrid& u_prev,
                              double dt) const {
    const int m = grid_.m();
    const int n = grid_.n();
    if (u_curr.rows() != m + 2 || u_curr.cols() != n + 2 || u_prev.rows() != m + 2 ||
        u_prev.cols() != n + 2)
        throw std::invalid_argument("energy: field must be (m+2) x (n+2)");
    if (!(dt > 0.0)) throw std::invalid_argument("energy: dt must be positive");

    const auto& ax = grid_.axis_x;
    const auto& ay = grid_.axis_y;

    double kinetic = 0.0;
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= n; ++k)
            kinetic += mass_(j, k) * std::norm((u_curr(j, k) - u_prev(j, k)) / dt);

    double potential = 0.0;
    for (int i = 0; i <= m; ++i) {
        for (int k = 1; k <= n; ++k) {
            Complex dc = u_curr(i + 1, k) - u_curr(i, k);
            Complex dp = u_prev(i + 1, k) - u_prev(i, k);
            potential +=
                ay.dual[k] * flux_x_(i, k) * (dc.real() * dp.real() + dc.imag() * dp.imag());
        }
    }
    for (int j = 1; j <= m; ++j) {
        for (int i = 0; i <= n; ++i) {
            Complex dc = u_curr(j, i + 1) - u_curr(j, i);
            Complex dp = u_prev(j, i + 1) - u_prev(j, i);
            potential +=
                ax.dual[j] * flux_y_(j, i) * (dc.real() * dp.real() + dc.imag() * dp.imag());
        }
    }
    return 0.5 * kinetic + 0.5 * potential;
}

double WaveEquation2D::energy_rate_form(const ComplexGrid& u, const ComplexGrid& du_dt) const {
    const int m = grid_.m();
    const int n = grid_.n();
    if (u.rows() != m + 2 || u.cols() != n + 2 || du_dt.rows() != m + 2 || du_dt.cols() != n + 2)
        throw std::invalid_argument("energy_rate_form: field must be (m+2) x (n+2)");

    const auto& ax = grid_.axis_x;
    const auto& ay = grid_.axis_y;

    double kinetic = 0.0;
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= n; ++k) kinetic += mass_(j, k) * std::norm(du_dt(j, k));

    double potential = 0.0;
    for (int i = 0; i <= m; ++i)
        for (int k = 1; k <= n; ++k)
            potential += ay.dual[k] * flux_x_(i, k) * std::norm(u(i + 1, k) - u(i, k));
    for (int j = 1; j <= m; ++j)
        for (int i = 0; i <= n; ++i)
            potential += ax.dual[j] * flux_y_(j, i) * std::norm(u(j, i + 1) - u(j, i));
    return 0.5 * kinetic + 0.5 * potential;
}

AxisEigen eigendecompose_axis(const TransformedGrid1D& axis,
                              const std::function<double(double)>& sigma) {
    const int n = axis.n_interior();
    auto sig = sigma ? sigma : [](double) { return 1.0; };

    Eigen::VectorXd flux(n + 1);
    for (int i = 0; i <= n; ++i) flux(i) = sig(axis.midpoints[i]) / axis.cell[i];

    Eigen::VectorXd weights(n);
    for (int j = 1; j <= n; ++j) weights(j - 1) = axis.dual[j];

    Eigen::VectorXd diag(n), subdiag(std::max(0, n - 1));
    for (int j = 1; j <= n; ++j) diag(j - 1) = (flux(j) + flux(j - 1)) / weights(j - 1);
    for (int j = 1; j < n; ++j)
        subdiag(j - 1) = -flux(j) / std::sqrt(weights(j - 1) * weights(j));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success)
        throw InvalidOperatorError("eigendecompose_axis: tridiagonal iteration failed");
    if (!(solver.eigenvalues()(0) > 0.0))
        throw InvalidOperatorError("eigendecompose_axis: operator is not positive definite");

    AxisEigen out;
    out.values = solver.eigenvalues();
    out.weights = weights;
    out.vectors = Eigen::MatrixXd::Zero(n + 2, n);
    for (int mode = 0; mode < n; ++mode) {
        Eigen::VectorXd v = solver.eigenvectors().col(mode);
        for (int j = 0; j < n; ++j) v(j) /= std::sqrt(weights(j));
        // Deterministic sign: the entry of largest magnitude is positive.
        int peak = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(v(j)) > std::abs(v(peak))) peak = j;
        if (v(peak) < 0.0) v = -v;
        for (int j = 1; j <= n; ++j) out.vectors(j, mode) = v(j - 1);
    }
    return out;
}

SpectralBasis2D build_spectral_basis(const Grid2D& grid) {
    return SpectralBasis2D{eigendecompose_axis(grid.axis_x), eigendecompose_axis(grid.axis_y)};
}

SpectralSolver2D::SpectralSolver2D(Grid2D grid)
    : grid_(std::move(grid)), basis_(build_spectral_basis(grid_)) {}

Eigen::MatrixXcd SpectralSolver2D::coefficients(const ComplexGrid& u0) const {
    const int m = grid_.m();
    const int n = grid_.n();
    if (u0.rows() != m + 2 || u0.cols() != n + 2)
        throw std::invalid_argument("coefficients: field must be (m+2) x (n+2)");
    Eigen::MatrixXd psi = basis_.x.vectors.middleRows(1, m);
    Eigen::MatrixXd ups = basis_.y.vectors.middleRows(1, n);
    Eigen::MatrixXcd interior = u0.block(1, 1, m, n);
    return psi.transpose() * (basis_.x.weights.asDiagonal() * interior *
                              basis_.y.weights.asDiagonal()) * ups;
}

ComplexGrid SpectralSolver2D::assemble(const Eigen::MatrixXcd& modal) const {
    const int m = grid_.m();
    const int n = grid_.n();
    Eigen::MatrixXd psi = basis_.x.vectors.middleRows(1, m);
    Eigen::MatrixXd ups = basis_.y.vectors.middleRows(1, n);
    ComplexGrid u = ComplexGrid::Zero(m + 2, n + 2);
    u.block(1, 1, m, n) = psi * modal * ups.transpose();
    return u;
}

ComplexGrid SpectralSolver2D::solve(const ComplexGrid& u0, double t) const {
    Eigen::MatrixXcd modal = coefficients(u0);
    const int m = grid_.m();
    const int n = grid_.n();
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < n; ++b) {
            double omega = std::sqrt(basis_.x.values(a) + basis_.y.values(b));
            modal(a, b) *= std::exp(Complex(0.0, t * omega));
        }
    }
    return assemble(modal);
}

ComplexGrid SpectralSolver2D::time_derivative(const ComplexGrid& u0, double t) const {
    Eigen::MatrixXcd modal = coefficients(u0);
    const int m = grid_.m();
    const int n = grid_.n();
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < n; ++b) {
            double omega = std::sqrt(basis_.x.values(a) + basis_.y.values(b));
            modal(a, b) *= Complex(0.0, omega) * std::exp(Complex(0.0, t * omega));
        }
    }
    return assemble(modal);
}

ComplexGrid SpectralSolver2D::solve_two_branch(const ComplexGrid& u0, const ComplexGrid& u1,
                                               double t) const {
    Eigen::MatrixXcd beta0 = coefficients(u0);
    Eigen::MatrixXcd beta1 = coefficients(u1);
    const int m = grid_.m();
    const int n = grid_.n();
    Eigen::MatrixXcd modal(m, n);
    for (int a = 0; a < m; ++a) {
        for (int b = 0; b < n; ++b) {
            double omega = std::sqrt(basis_.x.values(a) + basis_.y.values(b));
            Complex up = 0.5 * (beta0(a, b) - Complex(0.0, 1.0) * beta1(a, b) / omega);
            Complex down = 0.5 * (beta0(a, b) + Complex(0.0, 1.0) * beta1(a, b) / omega);
            modal(a, b) = up * std::exp(Complex(0.0, t * omega)) +
                          down * std::exp(Complex(0.0, -t * omega));
        }
    }
    return assemble(modal);
}

double weighted_norm2(const Grid2D& grid, const ComplexGrid& u) {
    const int m = grid.m();
    const int n = grid.n();
    if (u.rows() != m + 2 || u.cols() != n + 2)
        throw std::invalid_argument("weighted_norm2: field must be (m+2) x (n+2)");
    double total = 0.0;
    for (int j = 1; j <= m; ++j)
        for (int k = 1; k <= n; ++k)
            total += grid.axis_x.dual[j] * grid.axis_y.dual[k] * std::norm(u(j, k));
    return total;
}

ComplexGrid gaussian_packet_2d(const Grid2D& grid, double x0, double y0, double xi0, double eta0,
                               double gamma) {
    if (std::abs(x0) > 1.0 || std::abs(y0) > 1.0)
        throw std::invalid_argument("gaussian_packet_2d: center must lie in the closed square");
    if (!(gamma > 0.0)) throw std::invalid_argument("gaussian_packet_2d: gamma must be positive");

    const int m = grid.m();
    const int n = grid.n();
    const double hx = grid.axis_x.uniform_step();
    const double hy = grid.axis_y.uniform_step();

    ComplexGrid u = ComplexGrid::Zero(m + 2, n + 2);
    for (int j = 1; j <= m; ++j) {
        double x = grid.axis_x.nodes[j];
        for (int k = 1; k <= n; ++k) {
            double y = grid.axis_y.nodes[k];
            double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
            u(j, k) = std::exp(Complex(-gamma * r2, x * xi0 / hx + y * eta0 / hy));
        }
    }
    return u;
}

std::array<double, 3> lambda_symbols(const MeshMap& map_x, const MeshMap& map_y, double x,
                                     double y, double xi, double eta) {
    double l1 = 2.0 * std::sin(0.5 * xi) / map_x.deriv(map_x.inverse(x));
    double l2 = 2.0 * std::sin(0.5 * eta) / map_y.deriv(map_y.inverse(y));
    return {l1, l2, l1 * l1 + l2 * l2};
}

std::pair<double, double> centroid_2d(const Grid2D& grid, const RealGrid& modulus) {
    const int m = grid.m();
    const int n = grid.n();
    if (modulus.rows() != m + 2 || modulus.cols() != n + 2)
        throw std::invalid_argument("centroid_2d: field must be (m+2) x (n+2)");
    double num_x = 0.0, num_y = 0.0, den = 0.0;
    for (int j = 1; j <= m; ++j) {
        for (int k = 1; k <= n; ++k) {
            double w = grid.axis_x.dual[j] * grid.axis_y.dual[k] * modulus(j, k) * modulus(j, k);
            num_x += w * grid.axis_x.nodes[j];
            num_y += w * grid.axis_y.nodes[k];
            den += w;
        }
    }
    if (!(den > 1e-280)) throw UndefinedCentroidError("centroid_2d: field carries no mass");
    return {num_x / den, num_y / den};
}

namespace {

RaySystem1D make_axis_ray_system(const MeshMap& map, double r0, Branch branch) {
    double s = branch_sign(branch);
    auto rhs = [map, r0, s](const PhasePoint& p) {
        double y = map.inverse(p.x);
        double gp = map.deriv(y);
        double gpp = map.second_deriv(y);
        double half = std::sin(0.5 * p.xi);
        PhasePoint d;
        d.x = -s * std::sin(p.xi) / (r0 * gp);
        d.xi = -s * 4.0 * half * half * gpp / (r0 * gp * gp * gp);
        return d;
    };
    return RaySystem1D("axis2d/" + map.name(), RayCoordinate::physical, branch,
                       DispersionLaw::discrete_law(), rhs, nullptr);
}

}

RayPath2D integrate_ray_2d(const MeshMap& map_x, const MeshMap& map_y, double x0, double y0,
                           double xi0, double eta0, double horizon, double dt, Branch branch) {
    if (std::abs(x0) > 1.0 || std::abs(y0) > 1.0)
        throw std::invalid_argument("integrate_ray_2d: start must lie in the closed square");
    auto [l1, l2, lam] = lambda_symbols(map_x, map_y, x0, y0, xi0, eta0);
    if (!(lam > 1e-280))
        throw DegenerateRayError("integrate_ray_2d: Lambda vanishes at the initial state");

    RayPath2D out;
    out.r1 = l1;
    out.r2 = l2;
    out.r0 = std::sqrt(lam);
    out.x_axis = integrate_ray(make_axis_ray_system(map_x, out.r0, branch), x0, xi0, horizon, dt);
    out.y_axis = integrate_ray(make_axis_ray_system(map_y, out.r0, branch), y0, eta0, horizon, dt);
    return out;
}

namespace {

// Nodes and weights of the q-point Gauss-Legendre rule on [-1,1], by Newton
// iteration on the Legendre recurrence.
void gauss_legendre(int q, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(q);
    weights.resize(q);
    for (int i = 0; i < q; ++i) {
        double x = std::cos(pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

}

double trap_period(const MeshMap& map, double r0, double r_axis, double x0, double xi0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("trap_period: r0 must be positive");
    if (!(r_axis > 0.0))
        throw NotTrappedError("trap_period: the axis symbol vanishes; axis is stationary");
    if (std::abs(x0) > 1.0)
        throw std::invalid_argument("trap_period: position must lie in [-1,1]");
    if (xi0 < 0.0 || xi0 > two_pi)
        throw std::invalid_argument("trap_period: frequency must lie in [0, 2 pi]");

    const double s = std::sin(0.5 * xi0);
    if (!(s > 0.0)) throw NotTrappedError("trap_period: sin(xi0/2) vanishes; axis is stationary");

    const double y0 = std::abs(map.inverse(x0));
    const double target = map.deriv(y0) / s;

    if (!(map.deriv(1.0) > map.deriv(0.0) * (1.0 + 1e-12)))
        throw NotTrappedError("trap_period: map does not refine toward the center; no turning");
    if (target > map.deriv(1.0) * (1.0 + 1e-12))
        throw NotTrappedError("trap_period: orbit reaches the wall before turning");
    // x0 = 0 with sin(xi0/2) = 1 puts the root of g'(y*) = target at y* = 0:
    // the datum is the equilibrium itself and nothing oscillates.
    if (y0 == 0.0 && target <= map.deriv(0.0))
        throw NotTrappedError("trap_period: datum sits at the equilibrium; no oscillation");

    double lo = y0, hi = 1.0;
    for (int iter = 0; iter < 200 && hi - lo > 1e-15; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (map.deriv(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    const double turning = 0.5 * (lo + hi);
    if (!(turning > 0.0))
        throw NotTrappedError("trap_period: datum sits at the equilibrium; no oscillation");
    const double g_turn = map.deriv(turning);

    auto integrand = [&map, turning, g_turn](double theta) {
        double z = turning * std::sin(theta);
        double ratio = map.deriv(z) / g_turn;
        double under = 1.0 - ratio * ratio;
        if (under <= 0.0) return 0.0;
        return map.deriv(z) * turning * std::cos(theta) / std::sqrt(under);
    };

    std::vector<double> nodes, weights;
    gauss_legendre(16, nodes, weights);
    auto composite = [&](int panels) {
        double total = 0.0;
        double width = pi / panels;
        for (int p = 0; p < panels; ++p) {
            double a = -0.5 * pi + p * width;
            for (size_t i = 0; i < nodes.size(); ++i)
                total += 0.5 * width * weights[i] * integrand(a + 0.5 * width * (nodes[i] + 1.0));
        }
        return total;
    };

    double coarse = composite(8);
    for (int panels = 16; panels <= 4096; panels *= 2) {
        double fine = composite(panels);
        if (std::abs(fine - coarse) <= 1e-8 * std::max(1.0, std::abs(fine)))
            return 2.0 * r0 / r_axis * fine;
        coarse = fine;
    }
    return 2.0 * r0 / r_axis * coarse;
}

}
