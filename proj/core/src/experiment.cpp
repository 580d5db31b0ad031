#include "gridwaves/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>
#include <utility>

#include "gridwaves/coefficients.hpp"
#include "gridwaves/io.hpp"
#include "gridwaves/mesh.hpp"
#include "gridwaves/version.hpp"
#include "gridwaves/wave2d.hpp"

namespace gridwaves {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string trim(const std::string& s) {
    const char* ws = " \t\r\n";
    size_t a = s.find_first_not_of(ws);
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 &&
        ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

bool parse_plain_double(const std::string& text, double& out) {
    std::string s = trim(text);
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end != begin && *end == '\0' && std::isfinite(out);
}

// Plain numbers plus fractions of pi: "pi", "2pi", "-pi/2", "7pi/15", "0.5pi".
bool parse_number(const std::string& raw, double& out) {
    std::string s = trim(raw);
    if (s.empty()) return false;
    size_t at = s.find("pi");
    if (at == std::string::npos) return parse_plain_double(s, out);
    std::string head = trim(s.substr(0, at));
    std::string tail = trim(s.substr(at + 2));
    double coef = 1.0;
    if (head == "-")
        coef = -1.0;
    else if (!head.empty() && head != "+" && !parse_plain_double(head, coef))
        return false;
    double divisor = 1.0;
    if (!tail.empty()) {
        if (tail[0] != '/') return false;
        if (!parse_plain_double(tail.substr(1), divisor) || divisor == 0.0) return false;
    }
    out = coef * kPi / divisor;
    return std::isfinite(out);
}

bool parse_integer(const std::string& raw, int& out) {
    std::string s = trim(raw);
    if (s.empty()) return false;
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') return false;
    if (v < INT_MIN || v > INT_MAX) return false;
    out = static_cast<int>(v);
    return true;
}

bool parse_flag(const std::string& raw, bool& out) {
    std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") {
        out = true;
        return true;
    }
    if (s == "false" || s == "0" || s == "no" || s == "off") {
        out = false;
        return true;
    }
    return false;
}

bool known_mesh(const std::string& id) {
    try {
        mesh_map_by_name(id);
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

// "one" or "{ kind = \"oscillatory\", A = <float>, kappa = <int> }".
bool parse_sigma(const std::string& raw, SigmaSpec& out, std::string& message) {
    std::string s = trim(raw);
    std::string bare = unquote(s);
    if (bare == "one" || bare == "unit" || bare == "1") {
        out = SigmaSpec{};
        return true;
    }
    if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
        message = "expected \"one\" or an inline table { kind = \"oscillatory\", ... }";
        return false;
    }
    SigmaSpec spec;
    spec.kind = SigmaSpec::Kind::oscillatory;
    spec.amplitude = std::numeric_limits<double>::quiet_NaN();
    bool saw_kind = false;
    std::stringstream body(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(body, item, ',')) {
        std::string entry = trim(item);
        if (entry.empty()) continue;
        size_t eq = entry.find('=');
        if (eq == std::string::npos) {
            message = "sigma table entries must look like key = value";
            return false;
        }
        std::string key = trim(entry.substr(0, eq));
        std::string value = trim(entry.substr(eq + 1));
        if (key == "kind") {
            if (unquote(value) != "oscillatory") {
                message = "unknown sigma kind '" + unquote(value) + "'";
                return false;
            }
            saw_kind = true;
        } else if (key == "A" || key == "amplitude") {
            if (!parse_number(value, spec.amplitude) || spec.amplitude < 0.0) {
                message = "sigma amplitude must be a number >= 0";
                return false;
            }
        } else if (key == "kappa" || key == "wavenumber") {
            if (!parse_integer(value, spec.wavenumber) || spec.wavenumber < 1) {
                message = "sigma kappa must be an integer >= 1";
                return false;
            }
        } else {
            message = "unknown sigma table key '" + key + "'";
            return false;
        }
    }
    if (!saw_kind) {
        message = "sigma table needs kind = \"oscillatory\"";
        return false;
    }
    if (!std::isfinite(spec.amplitude)) {
        message = "sigma table needs an amplitude A";
        return false;
    }
    out = spec;
    return true;
}

// "x:xi; x:xi; ..."
bool parse_seeds(const std::string& raw, std::vector<PhasePoint>& out, std::string& message) {
    std::vector<PhasePoint> seeds;
    std::stringstream list(unquote(trim(raw)));
    std::string item;
    while (std::getline(list, item, ';')) {
        std::string entry = trim(item);
        if (entry.empty()) continue;
        size_t colon = entry.find(':');
        if (colon == std::string::npos) {
            message = "seed entries must look like x:xi";
            return false;
        }
        PhasePoint p;
        if (!parse_number(entry.substr(0, colon), p.x) ||
            !parse_number(entry.substr(colon + 1), p.xi)) {
            message = "seed entry '" + entry + "' is not a pair of numbers";
            return false;
        }
        seeds.push_back(p);
    }
    if (seeds.empty()) {
        message = "seed list is empty";
        return false;
    }
    out = std::move(seeds);
    return true;
}

bool is_two_dimensional(RunKind kind) {
    return kind == RunKind::simulate2d || kind == RunKind::ray2d || kind == RunKind::period;
}

std::string sigma_to_string(const SigmaSpec& spec) {
    if (spec.kind == SigmaSpec::Kind::one) return "one";
    std::ostringstream out;
    out << "{ kind = \"oscillatory\", A = " << format_double(spec.amplitude)
        << ", kappa = " << spec.wavenumber << " }";
    return out.str();
}

}  // namespace

std::string run_kind_name(RunKind kind) {
    switch (kind) {
        case RunKind::simulate1d: return "simulate1d";
        case RunKind::ray1d: return "ray1d";
        case RunKind::portrait: return "portrait";
        case RunKind::simulate2d: return "simulate2d";
        case RunKind::ray2d: return "ray2d";
        case RunKind::spectrum: return "spectrum";
        case RunKind::period: return "period";
    }
    return "simulate1d";
}

std::optional<RunKind> run_kind_from_name(const std::string& name) {
    static const std::pair<const char*, RunKind> table[] = {
        {"simulate1d", RunKind::simulate1d}, {"ray1d", RunKind::ray1d},
        {"portrait", RunKind::portrait},     {"simulate2d", RunKind::simulate2d},
        {"ray2d", RunKind::ray2d},           {"spectrum", RunKind::spectrum},
        {"period", RunKind::period},
    };
    for (const auto& [id, kind] : table)
        if (name == id) return kind;
    return std::nullopt;
}

CoefficientField make_coefficients(const SigmaSpec& spec) {
    if (spec.kind == SigmaSpec::Kind::one) return unit_coefficients();
    return oscillatory_sigma(spec.amplitude, spec.wavenumber);
}

std::optional<ConfigIssue> set_config_value(ExperimentConfig& config, const std::string& key,
                                            const std::string& value, int line) {
    auto issue = [&](const std::string& message) {
        return ConfigIssue{line, key, message};
    };
    std::string bare = unquote(trim(value));

    if (key == "kind") {
        auto kind = run_kind_from_name(bare);
        if (!kind) return issue("unknown run kind '" + bare + "'");
        config.kind = *kind;
    } else if (key == "preset") {
        config.preset = bare;
    } else if (key == "mesh" || key == "mesh_x" || key == "mesh_y") {
        if (!known_mesh(bare)) return issue("unknown mesh map '" + bare + "'");
        if (key == "mesh") config.mesh = bare;
        if (key == "mesh_x") config.mesh_x = bare;
        if (key == "mesh_y") config.mesh_y = bare;
    } else if (key == "rho") {
        if (bare != "one" && bare != "1")
            return issue("only rho = one is supported");
    } else if (key == "sigma") {
        std::string message;
        if (!parse_sigma(value, config.sigma, message)) return issue(message);
    } else if (key == "n" || key == "nx" || key == "ny") {
        int v = 0;
        if (!parse_integer(bare, v) || v < 1)
            return issue("expected a positive integer");
        if (key == "n") config.n = v;
        if (key == "nx") config.nx = v;
        if (key == "ny") config.ny = v;
    } else if (key == "x0") {
        if (bare == "saddle") {
            config.x0_at_saddle = true;
        } else if (parse_number(bare, config.x0)) {
            config.x0_at_saddle = false;
        } else {
            return issue("expected a number or \"saddle\"");
        }
    } else if (key == "y0" || key == "xi0" || key == "eta0" || key == "cfl" ||
               key == "dt_ray" || key == "window") {
        double v = 0.0;
        if (!parse_number(bare, v)) return issue("expected a number");
        if (key == "y0") config.y0 = v;
        if (key == "xi0") config.xi0 = v;
        if (key == "eta0") config.eta0 = v;
        if (key == "cfl") config.cfl = v;
        if (key == "dt_ray") config.dt_ray = v;
        if (key == "window") config.window = v;
    } else if (key == "gamma") {
        if (bare == "auto") {
            config.gamma = 0.0;
        } else if (!parse_number(bare, config.gamma)) {
            return issue("expected a number or \"auto\"");
        }
    } else if (key == "T" || key == "horizon") {
        if (!parse_number(bare, config.horizon)) return issue("expected a number");
    } else if (key == "stride") {
        if (!parse_integer(bare, config.stride) || config.stride < 0)
            return issue("expected an integer >= 0");
    } else if (key == "branch") {
        if (bare == "plus")
            config.branch = Branch::plus;
        else if (bare == "minus")
            config.branch = Branch::minus;
        else
            return issue("branch must be plus or minus");
    } else if (key == "seeds") {
        std::string message;
        if (!parse_seeds(value, config.seeds, message)) return issue(message);
    } else if (key == "quiet") {
        if (!parse_flag(bare, config.quiet)) return issue("expected true or false");
    } else {
        return issue("unknown key");
    }
    return std::nullopt;
}

std::vector<ConfigIssue> validate_config(const ExperimentConfig& config) {
    std::vector<ConfigIssue> issues;
    auto flag = [&](const std::string& key, const std::string& message) {
        issues.push_back(ConfigIssue{0, key, message});
    };

    if (config.n < 1) flag("n", "needs at least one interior node");
    if (config.nx < 1) flag("nx", "needs at least one interior node");
    if (config.ny < 1) flag("ny", "needs at least one interior node");
    if (!(config.horizon > 0.0)) flag("horizon", "must be positive");
    if (!(config.cfl > 0.0) || config.cfl > 1.0) flag("cfl", "must lie in (0, 1]");
    if (!(config.dt_ray > 0.0)) flag("dt_ray", "must be positive");
    if (config.gamma < 0.0) flag("gamma", "must be >= 0 (0 selects the mesh default)");
    if (!(config.window > 0.0)) flag("window", "must be positive");
    if (config.xi0 < 0.0 || config.xi0 > 2.0 * kPi) flag("xi0", "must lie in [0, 2 pi]");
    if (config.eta0 < 0.0 || config.eta0 > 2.0 * kPi) flag("eta0", "must lie in [0, 2 pi]");

    const bool two_d = is_two_dimensional(config.kind);
    if (!config.x0_at_saddle) {
        if (config.kind == RunKind::simulate1d) {
            if (!(std::abs(config.x0) < 1.0))
                flag("x0", "packet centers must be strictly inside (-1, 1)");
        } else if (std::abs(config.x0) > 1.0) {
            flag("x0", "must lie in [-1, 1]");
        }
    } else if (two_d || config.kind == RunKind::spectrum) {
        flag("x0", "\"saddle\" resolution is only available for 1d runs");
    }
    if (two_d && std::abs(config.y0) > 1.0) flag("y0", "must lie in [-1, 1]");
    if (two_d && config.sigma.kind != SigmaSpec::Kind::one)
        flag("sigma", "2d runs support unit coefficients only");
    return issues;
}

ParseResult parse_config(const std::string& text) {
    struct Entry {
        int line;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;
    std::vector<ConfigIssue> issues;

    std::stringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos) {
            issues.push_back(ConfigIssue{line_no, "", "expected key = value"});
            continue;
        }
        Entry e;
        e.line = line_no;
        e.key = trim(line.substr(0, eq));
        e.value = trim(line.substr(eq + 1));
        if (e.key.empty()) {
            issues.push_back(ConfigIssue{line_no, "", "missing key before '='"});
            continue;
        }
        entries.push_back(std::move(e));
    }

    // A preset expands first so explicit keys override its values. Preset
    // entries are applied directly; validation runs once at the end against
    // the resolved kind.
    ExperimentConfig config;
    for (const Entry& e : entries) {
        if (e.key != "preset") continue;
        std::string name = unquote(e.value);
        const Preset* preset = find_preset(name);
        if (!preset) {
            issues.push_back(ConfigIssue{e.line, "preset", "unknown preset '" + name + "'"});
            continue;
        }
        std::stringstream body(preset->entries);
        std::string line;
        while (std::getline(body, line)) {
            std::string item = trim(line);
            if (item.empty() || item[0] == '#') continue;
            size_t eq = item.find('=');
            std::string key = trim(item.substr(0, eq));
            std::string value = trim(item.substr(eq + 1));
            if (auto issue = set_config_value(config, key, value, e.line))
                issues.push_back(ConfigIssue{e.line, "preset",
                                             "inside preset '" + name + "': " + issue->message});
        }
        config.preset = name;
    }

    for (const Entry& e : entries) {
        if (e.key == "preset") continue;
        if (auto issue = set_config_value(config, e.key, e.value, e.line)) issues.push_back(*issue);
    }

    for (const ConfigIssue& issue : validate_config(config)) issues.push_back(issue);

    ParseResult result;
    result.issues = std::move(issues);
    if (result.issues.empty()) result.config = std::move(config);
    return result;
}

std::string serialize_config(const ExperimentConfig& config) {
    std::ostringstream out;
    out << "kind = " << run_kind_name(config.kind) << "\n";
    if (!config.preset.empty()) out << "preset = " << config.preset << "\n";

    const bool two_d = is_two_dimensional(config.kind);
    if (two_d) {
        out << "mesh_x = " << config.mesh_x << "\n";
        out << "mesh_y = " << config.mesh_y << "\n";
        out << "nx = " << config.nx << "\n";
        out << "ny = " << config.ny << "\n";
    } else {
        out << "mesh = " << config.mesh << "\n";
        out << "sigma = " << sigma_to_string(config.sigma) << "\n";
        out << "n = " << config.n << "\n";
    }

    if (config.kind != RunKind::spectrum) {
        if (config.x0_at_saddle)
            out << "x0 = saddle\n";
        else
            out << "x0 = " << format_double(config.x0) << "\n";
        out << "xi0 = " << format_double(config.xi0) << "\n";
        if (two_d) {
            out << "y0 = " << format_double(config.y0) << "\n";
            out << "eta0 = " << format_double(config.eta0) << "\n";
        }
        out << "horizon = " << format_double(config.horizon) << "\n";
    }

    if (config.kind == RunKind::simulate1d || config.kind == RunKind::simulate2d) {
        if (config.gamma > 0.0)
            out << "gamma = " << format_double(config.gamma) << "\n";
        else
            out << "gamma = auto\n";
        out << "cfl = " << format_double(config.cfl) << "\n";
        out << "stride = " << config.stride << "\n";
    }
    if (config.kind == RunKind::ray1d || config.kind == RunKind::portrait ||
        config.kind == RunKind::ray2d || config.kind == RunKind::period) {
        out << "dt_ray = " << format_double(config.dt_ray) << "\n";
        out << "branch = " << (config.branch == Branch::plus ? "plus" : "minus") << "\n";
    }
    if (config.kind == RunKind::portrait) {
        out << "window = " << format_double(config.window) << "\n";
        if (!config.seeds.empty()) {
            out << "seeds = ";
            for (size_t i = 0; i < config.seeds.size(); ++i) {
                if (i) out << "; ";
                out << format_double(config.seeds[i].x) << ":" << format_double(config.seeds[i].xi);
            }
            out << "\n";
        }
    }
    return out.str();
}

namespace {

std::string preset_lines(std::initializer_list<std::pair<const char*, std::string>> kv) {
    std::ostringstream out;
    for (const auto& [key, value] : kv) out << key << " = " << value << "\n";
    return out.str();
}

std::string num(double v) { return format_double(v); }

std::vector<Preset> build_preset_catalogue() {
    std::vector<Preset> presets;
    auto add = [&](std::string name, std::string summary, std::string entries) {
        presets.push_back(Preset{std::move(name), std::move(summary), std::move(entries)});
    };

    auto packet1d = [&](const char* mesh, double x0, double xi0, double horizon) {
        return preset_lines({{"mesh", mesh},
                             {"x0", num(x0)},
                             {"xi0", num(xi0)},
                             {"horizon", num(horizon)}});
    };

    add("lowfreq-tan", "low-frequency packet crossing a center-refined mesh",
        packet1d("tan_center", 0.0, kPi / 4.0, 5.0));
    add("nonprop-uniform", "frequency pi packet, uniform mesh: standing oscillation",
        packet1d("identity", 0.0, kPi, 5.0));
    add("nonprop-tan", "frequency pi packet trapped on the center-refined mesh",
        packet1d("tan_center", 0.0, kPi, 5.0));
    add("nonprop-sin", "frequency pi packet on the boundary-refined mesh",
        packet1d("sin_boundary", 0.0, kPi, 5.0));
    add("mirror-uniform", "frequency 7 pi/4 packet, uniform mesh",
        packet1d("identity", 0.0, 7.0 * kPi / 4.0, 5.0));
    add("mirror-tan", "frequency 7 pi/4 packet turned around inside the center-refined mesh",
        packet1d("tan_center", 0.0, 7.0 * kPi / 4.0, 5.0));
    add("mirror-sin", "frequency 7 pi/4 packet on the boundary-refined mesh",
        packet1d("sin_boundary", 0.0, 7.0 * kPi / 4.0, 5.0));
    add("internal-low", "internal reflection at a wide turning point, center-refined mesh",
        packet1d("tan_center", 0.0, 7.0 * kPi / 15.0, 5.0));
    add("internal-mid", "internal reflection at a mid turning point, center-refined mesh",
        packet1d("tan_center", 0.0, 10.0 * kPi / 15.0, 5.0));
    add("internal-high", "internal reflection close to the center, center-refined mesh",
        packet1d("tan_center", 0.0, 13.0 * kPi / 15.0, 5.0));
    add("saddle-right", "packet on the boundary-refined mesh drifting off the saddle at x > 0",
        packet1d("sin_boundary", 0.5, kPi, 5.0));
    add("saddle-left", "packet on the boundary-refined mesh drifting off the saddle at x < 0",
        packet1d("sin_boundary", -0.5, kPi, 5.0));

    auto oscillatory = [&](double amplitude, int kappa) {
        std::ostringstream out;
        out << "{ kind = \"oscillatory\", A = " << num(amplitude) << ", kappa = " << kappa
            << " }";
        return out.str();
    };
    auto variable1d = [&](const char* mesh, const std::string& x0, double xi0, double amplitude,
                          int kappa, double horizon) {
        return preset_lines({{"mesh", mesh},
                             {"sigma", oscillatory(amplitude, kappa)},
                             {"x0", x0},
                             {"xi0", num(xi0)},
                             {"horizon", num(horizon)}});
    };

    add("var-low", "oscillatory sigma, low frequency: classical transport",
        variable1d("identity", "0", kPi / 7.0, 1.0, 1, 5.0));
    add("var-low-strong", "strongly oscillatory sigma at low frequency",
        variable1d("identity", "0", kPi / 7.0, 7.0, 1, 5.0));
    add("var-kappa1", "oscillatory sigma with one coefficient period",
        variable1d("identity", "0", kPi / 7.0, 2.0, 1, 5.0));
    add("var-kappa5", "oscillatory sigma with five coefficient periods",
        variable1d("identity", "0", kPi / 7.0, 2.0, 5, 5.0));
    add("var-dispersive-tan", "frequency pi packet at the saddle of the center-refined mesh",
        variable1d("tan_center", "saddle", kPi, 1.0, 1, 5.0));
    add("var-dispersive-sin", "frequency pi packet at the saddle of the boundary-refined mesh",
        variable1d("sin_boundary", "saddle", kPi, 1.0, 1, 5.0));

    auto packet2d = [&](double x0, double y0, double xi0, double eta0, double horizon) {
        return preset_lines({{"mesh_x", "tan_center"},
                             {"mesh_y", "tan_center"},
                             {"x0", num(x0)},
                             {"y0", num(y0)},
                             {"xi0", num(xi0)},
                             {"eta0", num(eta0)},
                             {"horizon", num(horizon)}});
    };

    add("2d-low", "low-frequency packet crossing the center-refined square",
        packet2d(0.0, 0.5, kPi / 4.0, kPi / 4.0, 5.0));
    add("2d-wall-bounce", "wall packet, vertical frequency pi: trapped horizontal bouncing",
        packet2d(1.0, 0.0, kPi / 2.0, kPi, 10.0));
    add("2d-standing", "frequency (pi, pi) packet standing at the center",
        packet2d(0.0, 0.0, kPi, kPi, 10.0));
    add("2d-lissajous", "closed Lissajous orbit with equal axis frequencies",
        packet2d(0.0, std::tan(std::acos(std::pow(2.0, -0.25))), kPi / 2.0, kPi, 8.0));
    add("2d-trapped-a", "grid-trapped orbit, frequency pair (pi/2, 5 pi/6)",
        packet2d(0.0, 0.0, kPi / 2.0, 5.0 * kPi / 6.0, 21.0));
    add("2d-trapped-b", "grid-trapped orbit, frequency pair (pi/2, 7 pi/18)",
        packet2d(0.0, 0.0, kPi / 2.0, 7.0 * kPi / 18.0, 37.0));
    add("2d-trapped-c", "grid-trapped orbit, frequency pair (pi/2, 7 pi/12)",
        packet2d(0.0, 0.0, kPi / 2.0, 7.0 * kPi / 12.0, 118.0));

    return presets;
}

}  // namespace

const std::vector<Preset>& preset_catalogue() {
    static const std::vector<Preset> catalogue = build_preset_catalogue();
    return catalogue;
}

const Preset* find_preset(const std::string& name) {
    for (const Preset& preset : preset_catalogue())
        if (preset.name == name) return &preset;
    return nullptr;
}

namespace {

struct ArtifactWriter {
    std::string dir;
    std::vector<std::string> files;
    std::vector<std::string> notes;

    std::string path(const std::string& name) const { return dir + "/" + name; }

    void text(const std::string& name, const std::string& content) {
        write_text_file(path(name), content);
        files.push_back(name);
    }

    void image(const std::string& name, const std::vector<std::vector<double>>& rows,
               double scale_max = 0.0) {
        write_pgm(path(name), rows, scale_max);
        files.push_back(name);
    }
};

std::vector<std::vector<double>> matrix_rows(const Eigen::MatrixXd& m) {
    std::vector<std::vector<double>> rows(m.rows(), std::vector<double>(m.cols()));
    for (long r = 0; r < m.rows(); ++r)
        for (long c = 0; c < m.cols(); ++c) rows[r][c] = m(r, c);
    return rows;
}

std::string axis_csv(const std::vector<double>& nodes) {
    std::ostringstream out;
    out << "x\n";
    for (double x : nodes) out << format_double(x) << "\n";
    return out.str();
}

std::string energy_csv(const std::vector<double>& times, const std::vector<double>& energies) {
    std::ostringstream out;
    out << "t,energy\n";
    for (size_t k = 0; k < times.size(); ++k)
        out << format_double(times[k]) << "," << format_double(energies[k]) << "\n";
    return out.str();
}

std::string reflections_csv(const std::vector<RayReflection>& reflections) {
    std::ostringstream out;
    out << "t,endpoint,xi_before,xi_after\n";
    for (const RayReflection& r : reflections)
        out << format_double(r.t) << "," << format_double(r.endpoint) << ","
            << format_double(r.xi_before) << "," << format_double(r.xi_after) << "\n";
    return out.str();
}

double packet_gamma(const ExperimentConfig& config, double step) {
    if (config.gamma > 0.0) return config.gamma;
    return std::pow(step, -0.9);
}

double resolve_saddle_abscissa(const ExperimentConfig& config) {
    MeshMap map = mesh_map_by_name(config.mesh);
    CoefficientField coeffs = make_coefficients(config.sigma);
    RaySystem1D system = make_physical_ray_system(map, coeffs, Branch::plus);
    EquilibriumScan scan = find_equilibria(system);
    const Equilibrium* best = nullptr;
    for (const Equilibrium& e : scan.equilibria) {
        if (e.kind != EquilibriumKind::saddle) continue;
        if (!best || std::abs(e.x) < std::abs(best->x) - 1e-12 ||
            (std::abs(std::abs(e.x) - std::abs(best->x)) <= 1e-12 && e.x > best->x))
            best = &e;
    }
    if (!best)
        throw Error("no saddle equilibrium for mesh '" + config.mesh +
                    "' with the configured coefficients");
    return best->x;
}

std::string equilibrium_kind_name(EquilibriumKind kind) {
    switch (kind) {
        case EquilibriumKind::center: return "center";
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::other: return "other";
    }
    return "other";
}

void run_simulate1d(const ExperimentConfig& config, ArtifactWriter& out) {
    MeshMap map = mesh_map_by_name(config.mesh);
    TransformedGrid1D grid = transform_grid(uniform_grid(config.n), map);
    CoefficientField coeffs = make_coefficients(config.sigma);

    PacketSpec spec;
    spec.center = config.x0;
    spec.frequency = config.xi0;
    spec.concentration = packet_gamma(config, grid.uniform_step());
    auto [u0, v0] = gaussian_packet(grid, spec);

    WaveEquation1D equation(grid, coeffs);
    LeapfrogOptions options;
    options.cfl = config.cfl;
    options.stride = config.stride;
    Trajectory1D traj = equation.integrate(u0, v0, config.horizon, options);

    out.text("grid.csv", axis_csv(grid.nodes));

    std::ostringstream st;
    st << "t";
    for (double x : grid.nodes) st << "," << format_double(x);
    st << "\n";
    for (size_t k = 0; k < traj.times.size(); ++k) {
        st << format_double(traj.times[k]);
        for (double v : traj.modulus[k]) st << "," << format_double(v);
        st << "\n";
    }
    out.text("spacetime.csv", st.str());

    Eigen::MatrixXd img(traj.modulus.size(), grid.nodes.size());
    for (size_t k = 0; k < traj.modulus.size(); ++k)
        for (size_t j = 0; j < traj.modulus[k].size(); ++j)
            img(static_cast<long>(k), static_cast<long>(j)) = traj.modulus[k][j];
    out.image("spacetime.pgm", matrix_rows(maxpool_to_limit(img, 512)));

    out.text("energy.csv", energy_csv(traj.energy_times, traj.energies));

    std::ostringstream cent;
    cent << "t,x\n";
    for (size_t k = 0; k < traj.times.size(); ++k)
        cent << format_double(traj.times[k]) << "," << format_double(traj.centroids[k]) << "\n";
    out.text("centroid.csv", cent.str());
}

void run_ray1d(const ExperimentConfig& config, ArtifactWriter& out) {
    MeshMap map = mesh_map_by_name(config.mesh);
    CoefficientField coeffs = make_coefficients(config.sigma);
    RaySystem1D system = make_physical_ray_system(map, coeffs, config.branch);
    RayPath path = integrate_ray(system, config.x0, config.xi0, config.horizon, config.dt_ray);

    std::ostringstream ray;
    const int branch = config.branch == Branch::plus ? 1 : -1;
    ray << "t,x,xi,branch,residual\n";
    for (size_t k = 0; k < path.t.size(); ++k) {
        PhasePoint p{path.x[k], path.xi[k]};
        ray << format_double(path.t[k]) << "," << format_double(path.x[k]) << ","
            << format_double(path.xi[k]) << "," << branch << ","
            << format_double(hamiltonian_residual(system, p, path.tau0)) << "\n";
    }
    out.text("ray.csv", ray.str());
    out.text("reflections.csv", reflections_csv(path.reflections));
}

void run_portrait(const ExperimentConfig& config, ArtifactWriter& out) {
    MeshMap map = mesh_map_by_name(config.mesh);
    CoefficientField coeffs = make_coefficients(config.sigma);
    RaySystem1D system = make_physical_ray_system(map, coeffs, config.branch);

    std::vector<PhasePoint> seeds = config.seeds;
    if (seeds.empty()) {
        for (double x : {-0.8, -0.4, 0.0, 0.4, 0.8})
            for (double frac : {0.25, 0.5, 0.75, 1.25, 1.5, 1.75})
                seeds.push_back(PhasePoint{x, frac * kPi});
    }

    std::vector<RayPath> orbits =
        phase_portrait(system, seeds, config.horizon, config.dt_ray, config.window);
    for (size_t k = 0; k < orbits.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "orbit_%03zu.csv", k);
        std::ostringstream orbit;
        orbit << "t,x,xi\n";
        for (size_t i = 0; i < orbits[k].t.size(); ++i)
            orbit << format_double(orbits[k].t[i]) << "," << format_double(orbits[k].x[i]) << ","
                  << format_double(orbits[k].xi[i]) << "\n";
        out.text(name, orbit.str());
    }

    EquilibriumScan scan = find_equilibria(system);
    std::ostringstream eq;
    eq << "x,xi,kind,re_eig1,im_eig1,re_eig2,im_eig2\n";
    for (const Equilibrium& e : scan.equilibria)
        eq << format_double(e.x) << "," << format_double(e.xi) << ","
           << equilibrium_kind_name(e.kind) << "," << format_double(e.eig1.real()) << ","
           << format_double(e.eig1.imag()) << "," << format_double(e.eig2.real()) << ","
           << format_double(e.eig2.imag()) << "\n";
    out.text("equilibria.csv", eq.str());

    if (scan.degenerate_line)
        out.notes.push_back("xi' vanishes identically: rest points form lines, none isolated");
    for (const std::string& warning : scan.warnings) out.notes.push_back(warning);
}

void run_simulate2d(const ExperimentConfig& config, ArtifactWriter& out) {
    Grid2D grid = make_grid_2d(config.nx, config.ny, mesh_map_by_name(config.mesh_x),
                               mesh_map_by_name(config.mesh_y));
    const double step = std::min(grid.axis_x.uniform_step(), grid.axis_y.uniform_step());
    ComplexGrid u0 = gaussian_packet_2d(grid, config.x0, config.y0, config.xi0, config.eta0,
                                        packet_gamma(config, step));

    SpectralSolver2D spectral(grid);
    ComplexGrid v0 = spectral.time_derivative(u0, 0.0);

    WaveEquation2D equation(grid, unit_coefficients_2d());
    LeapfrogOptions options;
    options.cfl = config.cfl;
    options.stride = config.stride;
    Trajectory2D traj = equation.integrate(u0, v0, config.horizon, options);

    out.text("grid_x.csv", axis_csv(grid.axis_x.nodes));
    out.text("grid_y.csv", axis_csv(grid.axis_y.nodes));

    double global_max = 0.0;
    for (const RealGrid& frame : traj.modulus) global_max = std::max(global_max, frame.maxCoeff());

    std::ostringstream index;
    index << "index,t,file\n";
    for (size_t k = 0; k < traj.modulus.size(); ++k) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%03zu.pgm", k);
        // Image rows run from y = +1 down to y = -1, columns along x.
        const RealGrid& field = traj.modulus[k];
        Eigen::MatrixXd img(field.cols(), field.rows());
        for (long r = 0; r < img.rows(); ++r)
            for (long c = 0; c < img.cols(); ++c) img(r, c) = field(c, img.rows() - 1 - r);
        out.image(name, matrix_rows(maxpool_to_limit(img, 512)), global_max);
        index << k << "," << format_double(traj.times[k]) << "," << name << "\n";
    }
    out.text("snapshots.csv", index.str());

    out.text("energy.csv", energy_csv(traj.energy_times, traj.energies));

    std::ostringstream cent;
    cent << "t,x,y\n";
    for (size_t k = 0; k < traj.times.size(); ++k)
        cent << format_double(traj.times[k]) << "," << format_double(traj.centroids[k].first)
             << "," << format_double(traj.centroids[k].second) << "\n";
    out.text("centroid.csv", cent.str());
}

std::string axis_ray_csv(const char* position, const char* frequency, const RayPath& path) {
    std::ostringstream out;
    out << "t," << position << "," << frequency << "\n";
    for (size_t k = 0; k < path.t.size(); ++k)
        out << format_double(path.t[k]) << "," << format_double(path.x[k]) << ","
            << format_double(path.xi[k]) << "\n";
    return out.str();
}

void run_ray2d(const ExperimentConfig& config, ArtifactWriter& out) {
    RayPath2D path = integrate_ray_2d(mesh_map_by_name(config.mesh_x),
                                      mesh_map_by_name(config.mesh_y), config.x0, config.y0,
                                      config.xi0, config.eta0, config.horizon, config.dt_ray,
                                      config.branch);
    out.text("ray_x.csv", axis_ray_csv("x", "xi", path.x_axis));
    out.text("ray_y.csv", axis_ray_csv("y", "eta", path.y_axis));
    out.text("reflections_x.csv", reflections_csv(path.x_axis.reflections));
    out.text("reflections_y.csv", reflections_csv(path.y_axis.reflections));

    std::ostringstream inv;
    inv << "name,value\n";
    inv << "r0," << format_double(path.r0) << "\n";
    inv << "r1," << format_double(path.r1) << "\n";
    inv << "r2," << format_double(path.r2) << "\n";
    out.text("invariants.csv", inv.str());
}

void run_spectrum(const ExperimentConfig& config, ArtifactWriter& out) {
    MeshMap map = mesh_map_by_name(config.mesh);
    TransformedGrid1D axis = transform_grid(uniform_grid(config.n), map);
    CoefficientField coeffs = make_coefficients(config.sigma);
    std::function<double(double)> sigma;
    if (!coeffs.is_constant_one()) sigma = [coeffs](double x) { return coeffs.sigma(x); };
    AxisEigen eigen = eigendecompose_axis(axis, sigma);

    out.text("grid.csv", axis_csv(axis.nodes));
    std::ostringstream values;
    values << "j,mu\n";
    for (long j = 0; j < eigen.values.size(); ++j)
        values << (j + 1) << "," << format_double(eigen.values[j]) << "\n";
    out.text("eigenvalues.csv", values.str());
}

double first_return_time(const std::vector<double>& t, const std::vector<double>& x,
                         double start) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (x.size() < 3) return nan;
    size_t k = 1;
    while (k < x.size() && std::abs(x[k] - start) < 1e-12) ++k;
    if (k == x.size()) return nan;
    const double dir0 = x[k] > start ? 1.0 : -1.0;
    for (size_t i = k; i + 1 < x.size(); ++i) {
        const double a = x[i] - start;
        const double b = x[i + 1] - start;
        if ((a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)) continue;
        const double step_dir = x[i + 1] > x[i] ? 1.0 : (x[i + 1] < x[i] ? -1.0 : 0.0);
        if (step_dir != dir0) continue;
        const double frac = a == b ? 0.0 : a / (a - b);
        return t[i] + frac * (t[i + 1] - t[i]);
    }
    return nan;
}

void run_period(const ExperimentConfig& config, ArtifactWriter& out) {
    MeshMap map_x = mesh_map_by_name(config.mesh_x);
    MeshMap map_y = mesh_map_by_name(config.mesh_y);
    auto symbols = lambda_symbols(map_x, map_y, config.x0, config.y0, config.xi0, config.eta0);
    const double r0 = std::sqrt(symbols[2]);
    const double r1 = std::abs(symbols[0]);
    const double r2 = std::abs(symbols[1]);

    RayPath2D path = integrate_ray_2d(map_x, map_y, config.x0, config.y0, config.xi0, config.eta0,
                                      config.horizon, config.dt_ray, config.branch);

    struct AxisRow {
        const char* axis;
        const MeshMap& map;
        double r_axis;
        double pos0;
        double freq0;
        const RayPath& ode;
    };
    const AxisRow rows[] = {
        {"x", map_x, r1, config.x0, config.xi0, path.x_axis},
        {"y", map_y, r2, config.y0, config.eta0, path.y_axis},
    };

    std::ostringstream csv;
    csv << "axis,r_axis,status,period_quadrature,period_first_return\n";
    for (const AxisRow& row : rows) {
        std::string status = "trapped";
        double quadrature = std::numeric_limits<double>::quiet_NaN();
        try {
            quadrature = trap_period(row.map, r0, row.r_axis, row.pos0, row.freq0);
        } catch (const NotTrappedError& e) {
            status = "not_trapped";
            out.notes.push_back(std::string(row.axis) + " axis: " + e.what());
        }
        const double first_return = first_return_time(row.ode.t, row.ode.x, row.pos0);
        csv << row.axis << "," << format_double(row.r_axis) << "," << status << ","
            << format_double(quadrature) << "," << format_double(first_return) << "\n";
    }
    out.text("period.csv", csv.str());

    std::ostringstream inv;
    inv << "name,value\n";
    inv << "r0," << format_double(r0) << "\n";
    inv << "r1," << format_double(r1) << "\n";
    inv << "r2," << format_double(r2) << "\n";
    out.text("invariants.csv", inv.str());
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    std::vector<ConfigIssue> issues = validate_config(config);
    if (!issues.empty()) throw ConfigError("invalid experiment config", issues);

    const auto start = std::chrono::steady_clock::now();
    std::filesystem::create_directories(out_dir);

    ExperimentConfig resolved = config;
    if (resolved.x0_at_saddle) {
        resolved.x0 = resolve_saddle_abscissa(resolved);
        resolved.x0_at_saddle = false;
    }

    ArtifactWriter out;
    out.dir = out_dir;
    switch (resolved.kind) {
        case RunKind::simulate1d: run_simulate1d(resolved, out); break;
        case RunKind::ray1d: run_ray1d(resolved, out); break;
        case RunKind::portrait: run_portrait(resolved, out); break;
        case RunKind::simulate2d: run_simulate2d(resolved, out); break;
        case RunKind::ray2d: run_ray2d(resolved, out); break;
        case RunKind::spectrum: run_spectrum(resolved, out); break;
        case RunKind::period: run_period(resolved, out); break;
    }

    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ostringstream manifest;
    manifest << "artifact = gridwaves " << version_string << "\n";
    char wall_text[64];
    std::snprintf(wall_text, sizeof(wall_text), "%.3f", wall);
    manifest << "wall_seconds = " << wall_text << "\n";
    manifest << "[config]\n" << serialize_config(resolved);
    manifest << "[outputs]\n";
    for (const std::string& file : out.files) manifest << file << "\n";
    if (!out.notes.empty()) {
        manifest << "[notes]\n";
        for (const std::string& note : out.notes) manifest << note << "\n";
    }
    write_text_file(out.path("manifest.txt"), manifest.str());
    out.files.push_back("manifest.txt");

    RunManifest result;
    result.directory = out_dir;
    result.files = std::move(out.files);
    result.wall_seconds = wall;
    return result;
}

}
