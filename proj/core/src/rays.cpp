#include "gridwaves/rays.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridwaves/errors.hpp"

namespace gridwaves {

namespace {

constexpr double pi = 3.14159265358979323846;
constexpr double two_pi = 2.0 * pi;

}

double DispersionLaw::omega(double xi) const {
    return kind == Kind::discrete ? 2.0 * std::sin(0.5 * xi) : xi;
}

double DispersionLaw::domega(double xi) const {
    return kind == Kind::discrete ? std::cos(0.5 * xi) : 1.0;
}

double group_velocity(const DispersionLaw& law, double xi) { return law.domega(xi); }

RaySystem1D::RaySystem1D(std::string name, RayCoordinate coordinate, Branch branch,
                         DispersionLaw law, Rhs rhs, SpeedFn cg, Jacobian jacobian)
    : name_(std::move(name)),
      coordinate_(coordinate),
      branch_(branch),
      law_(law),
      rhs_(std::move(rhs)),
      cg_(std::move(cg)),
      jacobian_(std::move(jacobian)) {
    if (!rhs_) throw std::invalid_argument("RaySystem1D: rhs must be set");
}

Mat2 RaySystem1D::jacobian(const PhasePoint& p) const {
    if (jacobian_) return jacobian_(p);
    const double step = 1e-6;
    PhasePoint xp{p.x + step, p.xi}, xm{p.x - step, p.xi};
    PhasePoint kp{p.x, p.xi + step}, km{p.x, p.xi - step};
    PhasePoint fxp = rhs_(xp), fxm = rhs_(xm), fkp = rhs_(kp), fkm = rhs_(km);
    Mat2 j;
    j.a11 = (fxp.x - fxm.x) / (2.0 * step);
    j.a12 = (fkp.x - fkm.x) / (2.0 * step);
    j.a21 = (fxp.xi - fxm.xi) / (2.0 * step);
    j.a22 = (fkp.xi - fkm.xi) / (2.0 * step);
    return j;
}

double RaySystem1D::speed_at(double position) const {
    if (!cg_) throw std::invalid_argument("RaySystem1D: no speed function attached");
    return cg_(position);
}

RaySystem1D make_reference_ray_system(const MeshMap& map, const CoefficientField& coefficients,
                                      Branch branch, DispersionLaw law) {
    double s = branch_sign(branch);
    auto rhs = [map, coefficients, law, s](const PhasePoint& p) {
        PhasePoint d;
        d.x = -s * effective_speed_cg(coefficients, map, p.x) * law.domega(p.xi);
        d.xi = s * effective_speed_cg_deriv(coefficients, map, p.x) * law.omega(p.xi);
        return d;
    };
    auto cg = [map, coefficients](double y) { return effective_speed_cg(coefficients, map, y); };
    return RaySystem1D("reference/" + map.name() + "/" + coefficients.name(),
                       RayCoordinate::reference, branch, law, rhs, cg);
}

namespace {

RaySystem1D::Jacobian builtin_physical_jacobian(const MeshMap& map,
                                                const CoefficientField& coefficients, double s,
                                                DispersionLaw law) {
    if (law.kind != DispersionLaw::Kind::discrete) return nullptr;

    if (coefficients.is_constant_one()) {
        if (map.name() == "identity") {
            return [s](const PhasePoint& p) {
                Mat2 j;
                j.a12 = 0.5 * s * std::sin(0.5 * p.xi);
                return j;
            };
        }
        if (map.name() == "tan_center") {
            // x' = -s cos(xi/2), xi' = -4 s x sin(xi/2) / (x^2 + 1)
            return [s](const PhasePoint& p) {
                double q = 1.0 + p.x * p.x;
                Mat2 j;
                j.a12 = 0.5 * s * std::sin(0.5 * p.xi);
                j.a21 = -4.0 * s * std::sin(0.5 * p.xi) * (1.0 - p.x * p.x) / (q * q);
                j.a22 = -2.0 * s * p.x * std::cos(0.5 * p.xi) / q;
                return j;
            };
        }
        if (map.name() == "sin_boundary") {
            // x' = -s cos(xi/2), xi' = 2 s x sin(xi/2) / (4 - x^2)
            return [s](const PhasePoint& p) {
                double q = 4.0 - p.x * p.x;
                Mat2 j;
                j.a12 = 0.5 * s * std::sin(0.5 * p.xi);
                j.a21 = 2.0 * s * std::sin(0.5 * p.xi) * (4.0 + p.x * p.x) / (q * q);
                j.a22 = s * p.x * std::cos(0.5 * p.xi) / q;
                return j;
            };
        }
        return nullptr;
    }

    if (map.name() == "identity") {
        // x' = -s c(x) cos(xi/2), xi' = s (sigma'(x)/c(x)) sin(xi/2)
        return [s, coefficients](const PhasePoint& p) {
            double c = wave_speed(coefficients, p.x);
            double dc = wave_speed_deriv(coefficients, p.x);
            double ds = coefficients.dsigma(p.x);
            const double step = 1e-6;
            double dds = (coefficients.dsigma(p.x + step) - coefficients.dsigma(p.x - step)) /
                         (2.0 * step);
            Mat2 j;
            j.a11 = -s * dc * std::cos(0.5 * p.xi);
            j.a12 = 0.5 * s * c * std::sin(0.5 * p.xi);
            j.a21 = s * std::sin(0.5 * p.xi) * (dds * c - ds * dc) / (c * c);
            j.a22 = 0.5 * s * (ds / c) * std::cos(0.5 * p.xi);
            return j;
        };
    }
    return nullptr;
}

}

RaySystem1D make_physical_ray_system(const MeshMap& map, const CoefficientField& coefficients,
                                     Branch branch, DispersionLaw law) {
    double s = branch_sign(branch);
    auto rhs = [map, coefficients, law, s](const PhasePoint& p) {
        auto [a, b] = grid_speed_pair(coefficients, map, p.x);
        PhasePoint d;
        d.x = -s * a * law.domega(p.xi);
        d.xi = s * b * law.omega(p.xi);
        return d;
    };
    auto cg = [map, coefficients](double x) {
        return effective_speed_cg(coefficients, map, map.inverse(x));
    };
    return RaySystem1D("physical/" + map.name() + "/" + coefficients.name(),
                       RayCoordinate::physical, branch, law, rhs, cg,
                       builtin_physical_jacobian(map, coefficients, s, law));
}

RaySystem1D make_variable_coefficient_ray_system(double amplitude, int wavenumber,
                                                 Branch branch) {
    return make_physical_ray_system(identity_map(), oscillatory_sigma(amplitude, wavenumber),
                                    branch);
}

PhasePoint variable_coefficient_rhs(double amplitude, int wavenumber, const PhasePoint& p) {
    return make_variable_coefficient_ray_system(amplitude, wavenumber, Branch::plus).rhs(p);
}

double branch_tau0(const RaySystem1D& system, const PhasePoint& initial) {
    return branch_sign(system.branch()) * system.speed_at(initial.x) *
           std::abs(system.law().omega(initial.xi));
}

double hamiltonian_residual(const RaySystem1D& system, const PhasePoint& p, double tau0) {
    double cg = system.speed_at(p.x);
    double w = system.law().omega(p.xi);
    return -tau0 * tau0 + cg * cg * w * w;
}

namespace {

PhasePoint rk4_step(const RaySystem1D& system, const PhasePoint& p, double dt) {
    PhasePoint k1 = system.rhs(p);
    PhasePoint k2 = system.rhs({p.x + 0.5 * dt * k1.x, p.xi + 0.5 * dt * k1.xi});
    PhasePoint k3 = system.rhs({p.x + 0.5 * dt * k2.x, p.xi + 0.5 * dt * k2.xi});
    PhasePoint k4 = system.rhs({p.x + dt * k3.x, p.xi + dt * k3.xi});
    return {p.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            p.xi + dt / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi)};
}

RayPath integrate_core(const RaySystem1D& system, double x0, double xi0, double horizon,
                       double dt, bool reflect, double clip_window) {
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate_ray: horizon must be positive");
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_ray: dt must be positive");
    if (reflect && std::abs(x0) > 1.0)
        throw std::invalid_argument("integrate_ray: start position must lie in [-1,1]");
    if (xi0 < 0.0 || xi0 > two_pi)
        throw std::invalid_argument("integrate_ray: frequency must lie in [0, 2 pi]");

    RayPath path;
    path.branch = system.branch();
    path.tau0 = system.has_speed() ? branch_tau0(system, {x0, xi0}) : 0.0;

    PhasePoint state{x0, xi0};
    double t = 0.0;
    path.t.push_back(t);
    path.x.push_back(state.x);
    path.xi.push_back(state.xi);

    int grazing_streak = 0;
    while (t < horizon - 1e-12) {
        double step = std::min(dt, horizon - t);
        PhasePoint next = rk4_step(system, state, step);

        if (reflect && std::abs(next.x) > 1.0 + 10.0 * dt) {
            std::ostringstream msg;
            msg << "ray step at t = " << t << " lands at x = " << next.x
                << ", beyond 1 + 10 dt; decrease dt";
            throw StepRejectionError(msg.str());
        }

        if (reflect && std::abs(next.x) > 1.0) {
            double lo = 0.0, hi = step;
            while (hi - lo > 1e-12) {
                double mid = 0.5 * (lo + hi);
                if (std::abs(rk4_step(system, state, mid).x) > 1.0)
                    hi = mid;
                else
                    lo = mid;
            }
            PhasePoint hit = rk4_step(system, state, hi);
            double wall = hit.x > 0.0 ? 1.0 : -1.0;
            t += hi;
            RayReflection event;
            event.t = t;
            event.endpoint = wall;
            event.xi_before = hit.xi;
            event.xi_after = two_pi - hit.xi;
            path.reflections.push_back(event);

            state = PhasePoint{wall, event.xi_after};
            path.t.push_back(t);
            path.x.push_back(state.x);
            path.xi.push_back(state.xi);

            grazing_streak = (hi < 1e-11) ? grazing_streak + 1 : 0;
            if (grazing_streak > 2)
                throw StepRejectionError("ray is grazing a wall; reflection does not separate");
            continue;
        }

        grazing_streak = 0;
        state = next;
        t += step;
        path.t.push_back(t);
        path.x.push_back(state.x);
        path.xi.push_back(state.xi);

        if (!reflect && std::abs(state.x) > clip_window) break;
    }
    return path;
}

}

RayPath integrate_ray(const RaySystem1D& system, double x0, double xi0, double horizon,
                      double dt) {
    return integrate_core(system, x0, xi0, horizon, dt, true, 0.0);
}

std::vector<RayPath> phase_portrait(const RaySystem1D& system,
                                    const std::vector<PhasePoint>& seeds, double horizon,
                                    double dt, double x_window) {
    if (seeds.empty()) throw std::invalid_argument("phase_portrait: need at least one seed");
    if (!(x_window > 0.0)) throw std::invalid_argument("phase_portrait: window must be positive");
    std::vector<RayPath> paths;
    paths.reserve(seeds.size());
    for (const PhasePoint& seed : seeds)
        paths.push_back(integrate_core(system, seed.x, seed.xi, horizon, dt, false, x_window));
    return paths;
}

namespace {

void eigenvalues_2x2(const Mat2& j, std::complex<double>& e1, std::complex<double>& e2) {
    double tr = j.a11 + j.a22;
    double det = j.a11 * j.a22 - j.a12 * j.a21;
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double r = std::sqrt(disc);
        e1 = std::complex<double>(0.5 * (tr + r), 0.0);
        e2 = std::complex<double>(0.5 * (tr - r), 0.0);
    } else {
        double im = 0.5 * std::sqrt(-disc);
        e1 = std::complex<double>(0.5 * tr, im);
        e2 = std::complex<double>(0.5 * tr, -im);
    }
}

}

Equilibrium classify_equilibrium(const RaySystem1D& system, double x, double xi) {
    PhasePoint residual = system.rhs({x, xi});
    if (std::max(std::abs(residual.x), std::abs(residual.xi)) > 1e-10)
        throw std::invalid_argument("classify_equilibrium: point fails the residual check");

    Equilibrium eq;
    eq.x = x;
    eq.xi = xi;
    eq.jacobian = system.jacobian({x, xi});
    eigenvalues_2x2(eq.jacobian, eq.eig1, eq.eig2);

    double magnitude = std::max(std::abs(eq.eig1), std::abs(eq.eig2));
    if (magnitude <= 1e-8) {
        eq.kind = EquilibriumKind::other;
    } else if (eq.eig1.imag() != 0.0 && std::abs(eq.eig1.real()) <= 1e-8 * magnitude) {
        eq.kind = EquilibriumKind::center;
    } else if (eq.eig1.imag() == 0.0 && eq.eig1.real() * eq.eig2.real() < 0.0) {
        eq.kind = EquilibriumKind::saddle;
    } else {
        eq.kind = EquilibriumKind::other;
    }
    return eq;
}

EquilibriumScan find_equilibria(const RaySystem1D& system, int resolution) {
    if (resolution < 4) throw std::invalid_argument("find_equilibria: resolution too small");

    EquilibriumScan scan;

    double max_dx = 0.0, max_dxi = 0.0;
    for (int i = 0; i < resolution; ++i) {
        for (int k = 0; k < resolution; ++k) {
            PhasePoint p{-1.0 + 2.0 * i / (resolution - 1.0), two_pi * k / (resolution - 1.0)};
            PhasePoint d = system.rhs(p);
            max_dx = std::max(max_dx, std::abs(d.x));
            max_dxi = std::max(max_dxi, std::abs(d.xi));
        }
    }
    if (max_dxi <= 1e-13 * std::max(1.0, max_dx)) {
        scan.degenerate_line = true;
        scan.warnings.push_back(
            "xi' vanishes identically: rest points form degenerate lines, none isolated");
        return scan;
    }
    const double scale = std::max(1.0, std::max(max_dx, max_dxi));

    for (int i = 0; i < resolution; ++i) {
        for (int k = 0; k < resolution; ++k) {
            PhasePoint p{-1.0 + 2.0 * i / (resolution - 1.0), two_pi * k / (resolution - 1.0)};
            bool converged = false;
            for (int iter = 0; iter < 60; ++iter) {
                PhasePoint f = system.rhs(p);
                if (std::max(std::abs(f.x), std::abs(f.xi)) <= 1e-12 * scale) {
                    converged = true;
                    break;
                }
                Mat2 j = system.jacobian(p);
                double det = j.a11 * j.a22 - j.a12 * j.a21;
                double jmag = std::max({std::abs(j.a11), std::abs(j.a12), std::abs(j.a21),
                                        std::abs(j.a22), 1e-30});
                if (std::abs(det) <= 1e-12 * jmag * jmag) break;
                p.x -= (f.x * j.a22 - f.xi * j.a12) / det;
                p.xi -= (f.xi * j.a11 - f.x * j.a21) / det;
                if (std::abs(p.x) > 1.5 || p.xi < -1.0 || p.xi > two_pi + 1.0) break;
            }
            if (!converged) continue;
            if (std::abs(p.x) > 1.0 + 1e-9 || p.xi < -1e-9 || p.xi > two_pi + 1e-9) continue;

            bool duplicate = false;
            for (const Equilibrium& known : scan.equilibria) {
                if (std::abs(known.x - p.x) <= 1e-6 && std::abs(known.xi - p.xi) <= 1e-6) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;

            Mat2 j = system.jacobian(p);
            double det = j.a11 * j.a22 - j.a12 * j.a21;
            double jmag = std::max({std::abs(j.a11), std::abs(j.a12), std::abs(j.a21),
                                    std::abs(j.a22), 1e-30});
            if (std::abs(det) <= 1e-8 * jmag * jmag) {
                scan.degenerate_line = true;
                scan.warnings.push_back("rest point with singular Jacobian dropped (degenerate)");
                continue;
            }
            scan.equilibria.push_back(classify_equilibrium(system, p.x, p.xi));
        }
    }

    std::sort(scan.equilibria.begin(), scan.equilibria.end(),
              [](const Equilibrium& a, const Equilibrium& b) {
                  return a.x != b.x ? a.x < b.x : a.xi < b.xi;
              });
    return scan;
}

}
