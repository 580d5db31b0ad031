#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gridwaves/errors.hpp"
#include "gridwaves/experiment.hpp"
#include "gridwaves/version.hpp"

namespace {

using namespace gridwaves;

const char* kUsage = R"(usage: gridwaves <command> [options] [key=value ...]

commands:
  simulate1d   leapfrog packet run on a transformed interval
  ray1d        one bi-characteristic with wall reflections
  portrait     phase portrait orbits and equilibria
  simulate2d   leapfrog packet run on a transformed square
  ray2d        per-axis bi-characteristics on the square
  spectrum     axis eigenvalues of the flux operator
  period       trapped-orbit periods, quadrature vs first return
  presets      list the built-in parameter sets

options:
  --config FILE    read key = value lines from FILE
  --preset NAME    start from a named preset
  --out DIR        output directory (default out/<command>)
  --stride N       snapshot stride override
  --sweep K=V1,V2  fan out one key over several values, one run per value
  --quiet          suppress progress lines
  --version        print the version and exit
  --help           print this text and exit

config keys: kind mesh mesh_x mesh_y rho sigma n nx ny x0 y0 xi0 eta0
gamma horizon (or T) cfl dt_ray stride branch window seeds quiet.
Numbers accept fractions of pi, e.g. xi0 = 7pi/15. x0 = saddle places a
1d packet on the saddle equilibrium of the configured ray system.
)";

void print_issues(const std::vector<ConfigIssue>& issues) {
    for (const ConfigIssue& issue : issues) {
        std::cerr << "config error";
        if (issue.line > 0) std::cerr << " (line " << issue.line << ")";
        if (!issue.key.empty()) std::cerr << " [" << issue.key << "]";
        std::cerr << ": " << issue.message << "\n";
    }
}

int list_presets() {
    for (const Preset& preset : preset_catalogue()) {
        std::cout << preset.name << "\n    " << preset.summary << "\n";
        std::stringstream entries(preset.entries);
        std::string line;
        while (std::getline(entries, line))
            if (!line.empty()) std::cout << "    " << line << "\n";
        std::cout << "\n";
    }
    return 0;
}

int run_single(const ExperimentConfig& config, const std::string& out_dir, bool quiet) {
    RunManifest manifest = run_experiment(config, out_dir);
    if (!quiet) {
        std::printf("%s: wrote %zu files to %s (%.3f s)\n", run_kind_name(config.kind).c_str(),
                    manifest.files.size(), manifest.directory.c_str(), manifest.wall_seconds);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cout << kUsage;
        return 2;
    }

    std::string command;
    std::string config_file;
    std::string preset;
    std::string out_dir;
    std::string sweep;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool quiet = false;

    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& arg = args[i];
        auto next = [&](const char* flag) -> std::string {
            if (i + 1 >= args.size()) {
                std::cerr << flag << " needs an argument\n";
                std::exit(2);
            }
            return args[++i];
        };
        if (arg == "--help" || arg == "-h") {
            std::cout << kUsage;
            return 0;
        } else if (arg == "--version") {
            std::cout << "gridwaves " << version_string << "\n";
            return 0;
        } else if (arg == "--config") {
            config_file = next("--config");
        } else if (arg == "--preset") {
            preset = next("--preset");
        } else if (arg == "--out") {
            out_dir = next("--out");
        } else if (arg == "--stride") {
            overrides.emplace_back("stride", next("--stride"));
        } else if (arg == "--sweep") {
            sweep = next("--sweep");
        } else if (arg == "--quiet") {
            quiet = true;
        } else if (arg.rfind("--", 0) == 0) {
            std::cerr << "unknown option " << arg << "\n" << kUsage;
            return 2;
        } else if (arg.find('=') != std::string::npos) {
            size_t eq = arg.find('=');
            overrides.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
        } else if (command.empty()) {
            command = arg;
        } else {
            std::cerr << "unexpected argument " << arg << "\n" << kUsage;
            return 2;
        }
    }

    if (command.empty()) {
        std::cerr << "missing command\n" << kUsage;
        return 2;
    }
    if (command == "presets") return list_presets();

    auto kind = run_kind_from_name(command);
    if (!kind) {
        std::cerr << "unknown command " << command << "\n" << kUsage;
        return 2;
    }

    // Assemble one flat document: preset flag first, then the config file,
    // then command-line overrides, so later entries win.
    std::ostringstream text;
    if (!preset.empty()) text << "preset = " << preset << "\n";
    if (!config_file.empty()) {
        std::ifstream in(config_file);
        if (!in) {
            std::cerr << "cannot read config file " << config_file << "\n";
            return 2;
        }
        text << in.rdbuf() << "\n";
    }
    for (const auto& [key, value] : overrides) text << key << " = " << value << "\n";
    text << "kind = " << command << "\n";

    ParseResult parsed = parse_config(text.str());
    if (!parsed.ok()) {
        print_issues(parsed.issues);
        return 2;
    }
    ExperimentConfig config = *parsed.config;
    if (quiet) config.quiet = true;

    if (out_dir.empty()) out_dir = "out/" + command;

    try {
        if (sweep.empty()) return run_single(config, out_dir, config.quiet);

        size_t eq = sweep.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "--sweep expects key=v1,v2,...\n";
            return 2;
        }
        const std::string key = sweep.substr(0, eq);
        std::vector<std::string> values;
        std::stringstream list(sweep.substr(eq + 1));
        std::string item;
        while (std::getline(list, item, ','))
            if (!item.empty()) values.push_back(item);
        if (values.empty()) {
            std::cerr << "--sweep has no values\n";
            return 2;
        }

        std::vector<ExperimentConfig> configs;
        for (const std::string& value : values) {
            ExperimentConfig variant = config;
            if (auto issue = set_config_value(variant, key, value)) {
                print_issues({*issue});
                return 2;
            }
            std::vector<ConfigIssue> issues = validate_config(variant);
            if (!issues.empty()) {
                print_issues(issues);
                return 2;
            }
            configs.push_back(std::move(variant));
        }

        std::vector<std::future<RunManifest>> futures;
        std::vector<std::string> dirs;
        for (size_t i = 0; i < configs.size(); ++i) {
            char sub[32];
            std::snprintf(sub, sizeof(sub), "run_%03zu", i);
            dirs.push_back(out_dir + "/" + sub);
            futures.push_back(std::async(std::launch::async, run_experiment, configs[i],
                                         dirs.back()));
        }

        std::ostringstream index;
        index << "index," << key << ",directory\n";
        int failures = 0;
        for (size_t i = 0; i < futures.size(); ++i) {
            try {
                RunManifest manifest = futures[i].get();
                if (!config.quiet)
                    std::printf("%s %s=%s: %zu files in %s\n", command.c_str(), key.c_str(),
                                values[i].c_str(), manifest.files.size(),
                                manifest.directory.c_str());
                index << i << "," << values[i] << "," << dirs[i] << "\n";
            } catch (const std::exception& e) {
                std::cerr << "sweep " << key << "=" << values[i] << " failed: " << e.what()
                          << "\n";
                ++failures;
            }
        }
        std::ofstream summary(out_dir + "/sweep.csv");
        summary << index.str();
        return failures == 0 ? 0 : 3;
    } catch (const ConfigError& e) {
        print_issues(e.issues());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 3;
    }
}
