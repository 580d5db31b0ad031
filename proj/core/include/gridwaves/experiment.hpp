#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridwaves/errors.hpp"
#include "gridwaves/rays.hpp"
#include "gridwaves/solver1d.hpp"

namespace gridwaves {

enum class RunKind { simulate1d, ray1d, portrait, simulate2d, ray2d, spectrum, period };

std::string run_kind_name(RunKind kind);
std::optional<RunKind> run_kind_from_name(const std::string& name);

/// Coefficient selector as it appears in config files: rho is always 1,
/// sigma either the constant 1 or the oscillatory family.
struct SigmaSpec {
    enum class Kind { one, oscillatory };
    Kind kind = Kind::one;
    double amplitude = 0.0;
    int wavenumber = 1;
};

CoefficientField make_coefficients(const SigmaSpec& spec);

/// One fully described run. Field relevance depends on `kind`; validation is
/// kind-aware (packet centers must be strictly interior in 1D, rays may start
/// on the walls, 2D runs take the closed square).
struct ExperimentConfig {
    RunKind kind = RunKind::simulate1d;

    std::string mesh = "tan_center";
    std::string mesh_x = "tan_center";
    std::string mesh_y = "tan_center";
    SigmaSpec sigma;

    int n = 199;
    int nx = 119;
    int ny = 119;

    double x0 = 0.0;
    double y0 = 0.0;
    double xi0 = 0.0;
    double eta0 = 0.0;
    /// Set by `x0 = saddle`: resolve the abscissa of the positive-x saddle of
    /// the configured ray system at run time.
    bool x0_at_saddle = false;

    double gamma = 0.0;  // <= 0 requests h^{-0.9}
    double horizon = 5.0;
    double cfl = 0.1;
    double dt_ray = 1e-3;
    int stride = 0;
    Branch branch = Branch::plus;
    double window = 4.0;
    std::vector<PhasePoint> seeds;  // portrait seeds; empty picks a lattice

    std::string preset;
    bool quiet = false;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigIssue> issues;

    bool ok() const { return issues.empty() && config.has_value(); }
};

/// Parses flat `key = value` text with # comment lines. Values may use
/// fractions of pi ("pi/4", "7pi/15", "2pi"). `sigma` accepts "one" or an
/// inline table { kind = "oscillatory", A = <float>, kappa = <int> }.
/// A `preset` key expands first; later keys override preset values. All
/// problems come back located by line and key.
ParseResult parse_config(const std::string& text);

/// Applies one key/value pair onto a config. Returns an issue instead of
/// throwing so callers can aggregate.
std::optional<ConfigIssue> set_config_value(ExperimentConfig& config, const std::string& key,
                                            const std::string& value, int line = 0);

/// Kind-aware cross-field validation.
std::vector<ConfigIssue> validate_config(const ExperimentConfig& config);

/// Canonical flat round-trippable form (used for the manifest echo).
std::string serialize_config(const ExperimentConfig& config);

struct Preset {
    std::string name;
    std::string summary;
    std::string entries;  // flat config fragment
};

const std::vector<Preset>& preset_catalogue();
const Preset* find_preset(const std::string& name);

struct RunManifest {
    std::string directory;
    std::vector<std::string> files;
    double wall_seconds = 0.0;
};

/// Executes the run and writes every declared artifact plus `manifest.txt`
/// into `out_dir` (created if needed). Numerical failures surface as the
/// library's error types; config problems as ConfigError.
RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}
