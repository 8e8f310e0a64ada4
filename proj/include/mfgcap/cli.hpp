#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "mfgcap/deterministic.hpp"
#include "mfgcap/model.hpp"

namespace mfgcap::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kBadInput = 2, kSolverFailed = 3 };

struct HorizonSpec {
    bool infinite = false;
    double length = 30.0;  // T, or s_max for the infinite horizon

    static HorizonSpec parse(const std::string& text);  // "finite:<T>" or "infinite:<s_max>"
    [[nodiscard]] std::string describe() const;
};

/// Everything a subcommand needs; built from defaults, then the config
/// file, then command-line flags.
struct RunConfig {
    ModelParams params;
    HorizonSpec horizon;
    double x0 = 10.0;
    std::string init = "point";  // point | lognormal:<mean>,<vol> | uniform:<a>,<b>
    std::size_t steps = 0;       // 0: 20 steps per unit of time
    SolverConfig solver;
    std::size_t paths = 10000;
    std::uint64_t seed = SolverConfig{}.rng_seed;
    std::vector<double> sigmas;  // simulate sweeps these; params.sigma is the first
    std::size_t store = 10;
    std::string density;         // lognormal:<mean>,<vol> | uniform:<a>,<b> | table:<csv with x,p>
    std::vector<double> at;      // snapshot times for the deterministic subcommand
    unsigned threads = 0;
    std::filesystem::path out = ".";

    [[nodiscard]] InitialDistribution initial() const;
    [[nodiscard]] InitialDensity initial_density() const;
    [[nodiscard]] TimeGrid grid() const;
};

using Settings = std::map<std::string, std::string>;

/// Flat "key = value" file; '#' starts a comment.
Settings read_config_file(const std::filesystem::path& path);

/// Applies settings on top of the defaults. Unknown keys and malformed
/// values raise ConfigError.
RunConfig build_config(const Settings& settings);

/// Keys accepted in config files and as --flags.
const std::vector<std::string>& known_keys();

/// Entry point; args exclude the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mfgcap::cli
