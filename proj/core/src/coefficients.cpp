#include "gridwaves/coefficients.hpp"

#include <cmath>
#include <stdexcept>

namespace gridwaves {

namespace {

constexpr double pi = 3.14159265358979323846;

}

CoefficientField::CoefficientField(std::string name, Fn rho, Fn drho, Fn sigma, Fn dsigma,
                                   double rho_floor, double sigma_floor, bool constant_one)
    : name_(std::move(name)),
      rho_(std::move(rho)),
      drho_(std::move(drho)),
      sigma_(std::move(sigma)),
      dsigma_(std::move(dsigma)),
      rho_floor_(rho_floor),
      sigma_floor_(sigma_floor),
      constant_one_(constant_one) {
    if (!rho_ || !drho_ || !sigma_ || !dsigma_)
        throw std::invalid_argument("CoefficientField: all four callables must be set");
    if (!(rho_floor_ > 0.0) || !(sigma_floor_ > 0.0))
        throw std::invalid_argument("CoefficientField: floors must be positive");
}

CoefficientField unit_coefficients() {
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    return CoefficientField("unit", one, zero, one, zero, 1.0, 1.0, true);
}

CoefficientField oscillatory_sigma(double amplitude, int wavenumber) {
    if (amplitude < 0.0)
        throw std::invalid_argument("oscillatory_sigma: amplitude must be nonnegative");
    if (wavenumber < 1)
        throw std::invalid_argument("oscillatory_sigma: wavenumber must be at least 1");

    double k = pi * wavenumber;
    auto sigma = [amplitude, k](double x) {
        double c = std::cos(k * x);
        return 1.0 + amplitude * c * c;
    };
    auto dsigma = [amplitude, k](double x) { return -amplitude * k * std::sin(2.0 * k * x); };
    auto one = [](double) { return 1.0; };
    auto zero = [](double) { return 0.0; };
    return CoefficientField("oscillatory(A=" + std::to_string(amplitude) +
                                ",kappa=" + std::to_string(wavenumber) + ")",
                            one, zero, sigma, dsigma, 1.0, 1.0, false);
}

double wave_speed(const CoefficientField& c, double x) {
    if (c.is_constant_one()) return 1.0;
    return std::sqrt(c.sigma(x) / c.rho(x));
}

double wave_speed_deriv(const CoefficientField& c, double x) {
    if (c.is_constant_one()) return 0.0;
    double rho = c.rho(x);
    double speed = std::sqrt(c.sigma(x) / rho);
    return (c.dsigma(x) * rho - c.sigma(x) * c.drho(x)) / (2.0 * rho * rho * speed);
}

double effective_speed_cg(const CoefficientField& c, const MeshMap& map, double y) {
    return wave_speed(c, map(y)) / map.deriv(y);
}

double effective_speed_cg_deriv(const CoefficientField& c, const MeshMap& map, double y) {
    double dg = map.deriv(y);
    return wave_speed_deriv(c, map(y)) - wave_speed(c, map(y)) * map.second_deriv(y) / (dg * dg);
}

std::pair<double, double> grid_speed_pair(const CoefficientField& c, const MeshMap& map,
                                          double x) {
    double a = wave_speed(c, x);
    double b = effective_speed_cg_deriv(c, map, map.inverse(x));
    return {a, b};
}

}
