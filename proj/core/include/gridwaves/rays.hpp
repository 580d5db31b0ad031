#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gridwaves/coefficients.hpp"
#include "gridwaves/mesh.hpp"

namespace gridwaves {

/// Frequency law of the spatial operator: the continuous symbol omega = xi or
/// the three-point discrete symbol omega = 2 sin(xi/2).
struct DispersionLaw {
    enum class Kind { continuous, discrete };
    Kind kind = Kind::discrete;

    double omega(double xi) const;
    double domega(double xi) const;

    static DispersionLaw continuous_law() { return {Kind::continuous}; }
    static DispersionLaw discrete_law() { return {Kind::discrete}; }
};

/// d omega / d xi. For the discrete law this is cos(xi/2), vanishing at the
/// odd multiples of pi where waves stop propagating.
double group_velocity(const DispersionLaw& law, double xi);

/// Sign of the time branch tau = -+ c_g omega. `plus` takes the upper sign of
/// every -+ / +- pair in the ray systems.
enum class Branch { plus, minus };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

struct PhasePoint {
    double x = 0.0;
    double xi = 0.0;
};

struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;
};

enum class RayCoordinate { reference, physical };

/// Autonomous bi-characteristic system on the (position, frequency) strip
/// [-1,1] x [0, 2 pi]. Carries its RHS, an optional analytic Jacobian
/// (central differences otherwise), and the local speed c_g for Hamiltonian
/// bookkeeping, expressed in the system's own position coordinate.
class RaySystem1D {
public:
    using Rhs = std::function<PhasePoint(const PhasePoint&)>;
    using Jacobian = std::function<Mat2(const PhasePoint&)>;
    using SpeedFn = std::function<double(double)>;

    RaySystem1D(std::string name, RayCoordinate coordinate, Branch branch, DispersionLaw law,
                Rhs rhs, SpeedFn cg, Jacobian jacobian = nullptr);

    PhasePoint rhs(const PhasePoint& p) const { return rhs_(p); }
    Mat2 jacobian(const PhasePoint& p) const;
    bool has_speed() const { return static_cast<bool>(cg_); }
    /// c_g at a position given in this system's coordinate.
    double speed_at(double position) const;

    Branch branch() const { return branch_; }
    const DispersionLaw& law() const { return law_; }
    RayCoordinate coordinate() const { return coordinate_; }
    const std::string& name() const { return name_; }

private:
    std::string name_;
    RayCoordinate coordinate_;
    Branch branch_;
    DispersionLaw law_;
    Rhs rhs_;
    SpeedFn cg_;
    Jacobian jacobian_;
};

/// Reference-variable system y' = -+ c_g(y) omega'(xi), xi' = +- c_g'(y) omega(xi).
RaySystem1D make_reference_ray_system(const MeshMap& map, const CoefficientField& coefficients,
                                      Branch branch,
                                      DispersionLaw law = DispersionLaw::discrete_law());

/// Physical-variable system x' = -+ a_g(x) omega'(xi), xi' = +- b_g(x) omega(xi).
/// Analytic Jacobians are attached for the builtin constant-coefficient maps
/// and the oscillatory family on the identity map.
RaySystem1D make_physical_ray_system(const MeshMap& map, const CoefficientField& coefficients,
                                     Branch branch,
                                     DispersionLaw law = DispersionLaw::discrete_law());

/// Uniform-mesh system for sigma = 1 + amplitude cos^2(wavenumber pi x), rho = 1.
RaySystem1D make_variable_coefficient_ray_system(double amplitude, int wavenumber, Branch branch);

/// RHS of the system above on the upper branch, as a plain function.
PhasePoint variable_coefficient_rhs(double amplitude, int wavenumber, const PhasePoint& p);

/// tau_0 = s c_g(x0) |omega(xi0)| for the system's branch sign s.
double branch_tau0(const RaySystem1D& system, const PhasePoint& initial);

/// H = -tau0^2 + c_g(x)^2 omega(xi)^2; zero along exact bi-characteristics.
double hamiltonian_residual(const RaySystem1D& system, const PhasePoint& p, double tau0);

struct RayReflection {
    double t = 0.0;
    double endpoint = 0.0;
    double xi_before = 0.0;
    double xi_after = 0.0;
};

struct RayPath {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> xi;
    std::vector<RayReflection> reflections;
    double tau0 = 0.0;
    Branch branch = Branch::plus;
};

/// Fixed-step RK4 with specular wall treatment: a step crossing |x| = 1 is
/// split by bisection on the substep time (tolerance 1e-12), the state is
/// snapped to the wall, and xi flips to 2 pi - xi. Throws StepRejectionError
/// when one step lands beyond |x| = 1 + 10 dt.
RayPath integrate_ray(const RaySystem1D& system, double x0, double xi0, double horizon,
                      double dt = 1e-3);

/// Free flights (no wall reflection) from the given seeds, each clipped once
/// |x| leaves the window. Used for phase portraits.
std::vector<RayPath> phase_portrait(const RaySystem1D& system,
                                    const std::vector<PhasePoint>& seeds, double horizon,
                                    double dt = 1e-3, double x_window = 4.0);

enum class EquilibriumKind { center, saddle, other };

struct Equilibrium {
    double x = 0.0;
    double xi = 0.0;
    Mat2 jacobian;
    std::complex<double> eig1, eig2;
    EquilibriumKind kind = EquilibriumKind::other;
};

struct EquilibriumScan {
    std::vector<Equilibrium> equilibria;
    /// True when xi' vanishes identically and rest points form lines instead
    /// of isolated zeros (uniform mesh with constant coefficients).
    bool degenerate_line = false;
    std::vector<std::string> warnings;
};

/// Newton refinement from a resolution x resolution lattice of seeds over
/// [-1,1] x [0, 2 pi], deduplicated to 1e-6.
EquilibriumScan find_equilibria(const RaySystem1D& system, int resolution = 48);

/// Jacobian eigenvalues and type at a located equilibrium. Throws
/// std::invalid_argument when the RHS residual at (x, xi) exceeds 1e-10.
Equilibrium classify_equilibrium(const RaySystem1D& system, double x, double xi);

}
