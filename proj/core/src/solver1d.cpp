#include "gridwaves/solver1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gridwaves/errors.hpp"

namespace gridwaves {

std::pair<ComplexField, ComplexField> gaussian_packet(const TransformedGrid1D& grid,
                                                      const PacketSpec& spec) {
    if (!(std::abs(spec.center) < 1.0))
        throw std::invalid_argument("gaussian_packet: center must lie strictly inside (-1,1)");

    const int n = grid.n_interior();
    const double h = grid.uniform_step();
    const double gamma = spec.concentration > 0.0 ? spec.concentration : std::pow(h, -0.9);
    const double y0 = grid.map.inverse(spec.center);

    ComplexField u0(n + 2, Complex(0.0, 0.0));
    ComplexField u1(n + 2, Complex(0.0, 0.0));
    for (int j = 1; j <= n; ++j) {
        double y = grid.source.nodes[j];
        double d = y - y0;
        Complex envelope = std::exp(Complex(-0.5 * gamma * d * d, spec.frequency * y / h));
        u0[j] = envelope;
        u1[j] = envelope * Complex(-gamma * d, spec.frequency / h) / grid.map.deriv(y);
    }
    return {std::move(u0), std::move(u1)};
}

WaveEquation1D::WaveEquation1D(TransformedGrid1D grid, CoefficientField coefficients)
    : grid_(std::move(grid)), coeffs_(std::move(coefficients)) {
    const int n = grid_.n_interior();
    flux_.resize(n + 1);
    for (int i = 0; i <= n; ++i)
        flux_[i] = coeffs_.sigma(grid_.midpoints[i]) / grid_.cell[i];
    mass_.resize(n + 2);
    inv_mass_.assign(n + 2, 0.0);
    for (int j = 0; j <= n + 1; ++j)
        mass_[j] = grid_.dual[j] * coeffs_.rho(grid_.nodes[j]);
    for (int j = 1; j <= n; ++j)
        inv_mass_[j] = 1.0 / mass_[j];
}

ComplexField WaveEquation1D::apply(const ComplexField& u) const {
    const int n = grid_.n_interior();
    if (u.size() != static_cast<size_t>(n) + 2)
        throw std::invalid_argument("apply: field length must be n_interior + 2");

    ComplexField v(n + 2, Complex(0.0, 0.0));
    for (int j = 1; j <= n; ++j)
        v[j] = (flux_[j] * (u[j + 1] - u[j]) - flux_[j - 1] * (u[j] - u[j - 1])) * inv_mass_[j];
    return v;
}

Trajectory1D WaveEquation1D::integrate(const ComplexField& u0, const ComplexField& v0,
                                       double horizon, const LeapfrogOptions& options) const {
    const int n = grid_.n_interior();
    if (u0.size() != static_cast<size_t>(n) + 2 || v0.size() != static_cast<size_t>(n) + 2)
        throw std::invalid_argument("integrate: data length must be n_interior + 2");
    if (!(horizon > 0.0)) throw std::invalid_argument("integrate: horizon must be positive");
    if (!(options.cfl > 0.0)) throw std::invalid_argument("integrate: cfl must be positive");

    const double dt_base = options.cfl * grid_.uniform_step();
    const int n_steps = std::max(1, static_cast<int>(std::ceil(horizon / dt_base - 1e-9)));
    const double dt = horizon / n_steps;
    const int stride =
        options.stride > 0 ? options.stride : std::max(1, n_steps / 512);

    Trajectory1D record;
    record.dt = dt;
    record.energy_times.reserve(n_steps);
    record.energies.reserve(n_steps);

    double reference_amp = 0.0;
    for (const Complex& value : u0) reference_amp = std::max(reference_amp, std::abs(value));
    const double blowup = options.blowup_factor * std::max(reference_amp, 1e-300);

    auto snapshot = [&](int step, const ComplexField& u) {
        record.times.push_back(step * dt);
        std::vector<double> modulus(n + 2);
        for (int j = 0; j <= n + 1; ++j) modulus[j] = std::abs(u[j]);
        record.centroids.push_back(centroid(grid_, modulus));
        record.modulus.push_back(std::move(modulus));
    };

    ComplexField u_prev = u0;
    ComplexField lu = apply(u0);
    ComplexField u_curr(n + 2, Complex(0.0, 0.0));
    for (int j = 1; j <= n; ++j)
        u_curr[j] = u0[j] + dt * v0[j] + 0.5 * dt * dt * lu[j];

    snapshot(0, u_prev);
    record.energy_times.push_back(0.5 * dt);
    record.energies.push_back(energy(u_curr, u_prev, dt));
    if (1 % stride == 0 || n_steps == 1) snapshot(1, u_curr);

    ComplexField u_next(n + 2, Complex(0.0, 0.0));
    for (int step = 2; step <= n_steps; ++step) {
        lu = apply(u_curr);
        double peak = 0.0;
        for (int j = 1; j <= n; ++j) {
            u_next[j] = 2.0 * u_curr[j] - u_prev[j] + dt * dt * lu[j];
            peak = std::max(peak, std::abs(u_next[j]));
        }
        std::swap(u_prev, u_curr);
        std::swap(u_curr, u_next);

        if (peak > blowup) {
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

double WaveEquation1D::energy(const ComplexField& u_curr, const ComplexField& u_prev,
                              double dt) const {
    const int n = grid_.n_interior();
    if (u_curr.size() != static_cast<size_t>(n) + 2 || u_prev.size() != static_cast<size_t>(n) + 2)
        throw std::invalid_argument("energy: field length must be n_interior + 2");
    if (!(dt > 0.0)) throw std::invalid_argument("energy: dt must be positive");

    double kinetic = 0.0;
    for (int j = 1; j <= n; ++j) {
        Complex v = (u_curr[j] - u_prev[j]) / dt;
        kinetic += mass_[j] * std::norm(v);
    }
    double potential = 0.0;
    for (int i = 0; i <= n; ++i) {
        Complex dc = u_curr[i + 1] - u_curr[i];
        Complex dp = u_prev[i + 1] - u_prev[i];
        potential += flux_[i] * (dc.real() * dp.real() + dc.imag() * dp.imag());
    }
    return 0.5 * kinetic + 0.5 * potential;
}

double WaveEquation1D::energy_rate_form(const ComplexField& u, const ComplexField& du_dt) const {
    const int n = grid_.n_interior();
    if (u.size() != static_cast<size_t>(n) + 2 || du_dt.size() != static_cast<size_t>(n) + 2)
        throw std::invalid_argument("energy_rate_form: field length must be n_interior + 2");

    double kinetic = 0.0;
    for (int j = 1; j <= n; ++j) kinetic += mass_[j] * std::norm(du_dt[j]);
    double potential = 0.0;
    for (int i = 0; i <= n; ++i) potential += flux_[i] * std::norm(u[i + 1] - u[i]);
    return 0.5 * kinetic + 0.5 * potential;
}

namespace {

double centroid_of_weights(const TransformedGrid1D& grid, const std::vector<double>& weight) {
    const int n = grid.n_interior();
    double num = 0.0;
    double den = 0.0;
    for (int j = 1; j <= n; ++j) {
        double w = grid.dual[j] * weight[j];
        num += w * grid.nodes[j];
        den += w;
    }
    if (!(den > 1e-280))
        throw UndefinedCentroidError("centroid: field carries no mass");
    return num / den;
}

}

double centroid(const TransformedGrid1D& grid, const std::vector<double>& modulus) {
    if (modulus.size() != static_cast<size_t>(grid.n_interior()) + 2)
        throw std::invalid_argument("centroid: field length must be n_interior + 2");
    std::vector<double> weight(modulus.size());
    for (size_t j = 0; j < modulus.size(); ++j) weight[j] = modulus[j] * modulus[j];
    return centroid_of_weights(grid, weight);
}

double centroid(const TransformedGrid1D& grid, const ComplexField& field) {
    if (field.size() != static_cast<size_t>(grid.n_interior()) + 2)
        throw std::invalid_argument("centroid: field length must be n_interior + 2");
    std::vector<double> weight(field.size());
    for (size_t j = 0; j < field.size(); ++j) weight[j] = std::norm(field[j]);
    return centroid_of_weights(grid, weight);
}

namespace {

Complex simpson_slice(const std::function<Complex(double)>& f, double a, double b, Complex fa,
                      Complex fm, Complex fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

Complex adaptive_simpson(const std::function<Complex(double)>& f, double a, double b, Complex fa,
                         Complex fm, Complex fb, Complex whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    Complex flm = f(lm);
    Complex frm = f(rm);
    Complex left = simpson_slice(f, a, m, fa, flm, fm);
    Complex right = simpson_slice(f, m, b, fm, frm, fb);
    Complex delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Complex integrate_adaptive(const std::function<Complex(double)>& f, double a, double b,
                           double tol) {
    if (a == b) return Complex(0.0, 0.0);
    Complex fa = f(a);
    Complex fb = f(b);
    Complex fm = f(0.5 * (a + b));
    Complex whole = simpson_slice(f, a, b, fa, fm, fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}

Complex dalembert_reference(const std::function<Complex(double)>& u0,
                            const std::function<Complex(double)>& u1, double x, double t,
                            double quad_tol) {
    if (t < 0.0) throw std::invalid_argument("dalembert_reference: t must be nonnegative");
    double left = x - t;
    double right = x + t;
    if (!(left > -1.0) || !(right < 1.0)) {
        std::ostringstream msg;
        msg << "dalembert_reference: dependence cone [" << left << ", " << right
            << "] leaves (-1,1)";
        throw OutOfValidityError(msg.str());
    }
    Complex value = 0.5 * (u0(right) + u0(left));
    if (t > 0.0) value += 0.5 * integrate_adaptive(u1, left, right, quad_tol);
    return value;
}

}
