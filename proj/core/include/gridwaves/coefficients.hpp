#pragma once

#include <functional>
#include <string>
#include <utility>

#include "gridwaves/mesh.hpp"

namespace gridwaves {

/// Material pair (rho, sigma) on [-1,1] with analytic derivatives and
/// certified positive lower bounds.
class CoefficientField {
public:
    using Fn = std::function<double(double)>;

    CoefficientField(std::string name, Fn rho, Fn drho, Fn sigma, Fn dsigma,
                     double rho_floor, double sigma_floor, bool constant_one);

    double rho(double x) const { return rho_(x); }
    double drho(double x) const { return drho_(x); }
    double sigma(double x) const { return sigma_(x); }
    double dsigma(double x) const { return dsigma_(x); }

    double rho_floor() const { return rho_floor_; }
    double sigma_floor() const { return sigma_floor_; }
    /// True when rho = sigma = 1 identically (enables exact fast paths).
    bool is_constant_one() const { return constant_one_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn rho_, drho_, sigma_, dsigma_;
    double rho_floor_, sigma_floor_;
    bool constant_one_;
};

/// rho = sigma = 1.
CoefficientField unit_coefficients();

/// rho = 1, sigma(x) = 1 + amplitude * cos^2(wavenumber * pi * x).
/// Requires amplitude >= 0 and wavenumber >= 1 (std::invalid_argument).
CoefficientField oscillatory_sigma(double amplitude, int wavenumber);

/// Local wave speed c = sqrt(sigma / rho).
double wave_speed(const CoefficientField& c, double x);
/// c'(x) computed from the coefficient derivatives.
double wave_speed_deriv(const CoefficientField& c, double x);

/// Grid-weighted speed c_g(y) = c(g(y)) / g'(y) in the reference variable.
double effective_speed_cg(const CoefficientField& c, const MeshMap& map, double y);
/// d/dy of the above: c'(g(y)) - c(g(y)) g''(y) / g'(y)^2.
double effective_speed_cg_deriv(const CoefficientField& c, const MeshMap& map, double y);

/// Physical-variable pair (a_g, b_g) at x:
///   a_g(x) = (g' c_g)(g^{-1}(x)) = c(x),
///   b_g(x) = c_g'(g^{-1}(x)).
std::pair<double, double> grid_speed_pair(const CoefficientField& c, const MeshMap& map,
                                          double x);

}
