#include "mfgcap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mfgcap/bounds.hpp"
#include "mfgcap/csv.hpp"
#include "mfgcap/equilibrium_finite.hpp"
#include "mfgcap/equilibrium_infinite.hpp"
#include "mfgcap/stochastic.hpp"

namespace mfgcap::cli {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw ConfigError("invalid number for '" + key + "': '" + text + "'");
    return v;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    Int v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
    return v;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("empty list for '" + key + "'");
    return out;
}

// "name:a,b" -> {name, [a, b]}
std::pair<std::string, std::vector<double>> parse_family(const std::string& key, const std::string& text,
                                                         std::size_t arity) {
    const auto colon = text.find(':');
    const std::string name = trim(text.substr(0, colon));
    if (colon == std::string::npos) {
        if (arity == 0) return {name, {}};
        throw ConfigError("'" + key + "' needs " + std::to_string(arity) + " parameters: '" + text + "'");
    }
    std::vector<double> args = parse_list(key, text.substr(colon + 1));
    if (args.size() != arity)
        throw ConfigError("'" + key + "' expects " + std::to_string(arity) + " parameters, got '" + text + "'");
    return {name, args};
}

std::size_t default_steps(double length) {
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(20.0 * length)));
}

void ensure_out_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw ConfigError("cannot create output directory " + dir.string());
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open " + path.string() + " for writing");
    f << j.dump(2) << '\n';
}

// Equilibrium plus its a priori band on the display grid.
struct Solved {
    EquilibriumSolution sol;
    AprioriBounds band;
    json diagnostics;
};

Solved solve_equilibrium(const RunConfig& cfg, double x_mean) {
    const TimeGrid grid = cfg.grid();
    const auto init = InitialDistribution::point_mass(x_mean);
    if (cfg.horizon.infinite) {
        auto [sol, rep] = shoot_equilibrium_infinite(cfg.params, init, grid, cfg.solver);
        json d = {{"zeta_star", rep.zeta_star},       {"bisections", rep.bisections},
                  {"segments", rep.segments},         {"terminal_gap", rep.terminal_gap},
                  {"polish_iterations", rep.polish_iterations},
                  {"s_max_extended", rep.q_extended.grid().t_end()}};
        return {std::move(sol), apriori_bounds_infinite(cfg.params, x_mean, grid), std::move(d)};
    }
    auto [sol, rep] = solve_equilibrium_finite(cfg.params, init, grid, cfg.solver);
    json d = {{"clamp_events", rep.clamp_events}, {"final_damping", rep.final_damping}};
    return {std::move(sol), apriori_bounds_finite(cfg.params, x_mean, grid), std::move(d)};
}

CsvTable equilibrium_table(const Solved& s) {
    const TimeGrid& g = s.sol.q_hat.grid();
    std::vector<double> t(g.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = g.at(k);
    auto vec = [](const GridFunction& f) { return std::vector<double>(f.values().begin(), f.values().end()); };
    return CsvTable{{"s", "z", "q_hat", "u_hat", "lower_bound", "upper_bound"},
                    {t, vec(s.sol.z), vec(s.sol.q_hat), vec(s.sol.u_hat), vec(s.band.y_lower),
                     vec(s.band.y_upper)}};
}

json summary_json(const RunConfig& cfg, const Solved& s) {
    json j = {{"status", "ok"},
              {"horizon", cfg.horizon.describe()},
              {"x0", s.sol.q_hat.front()},
              {"steps", s.sol.q_hat.grid().n_steps()},
              {"rho", cfg.params.rho},
              {"delta", cfg.params.delta},
              {"beta", cfg.params.beta},
              {"y_inf", steady_state(cfg.params)},
              {"value_at_mean", s.sol.value_at_mean},
              {"residual_sup", s.sol.residual_sup},
              {"iterations", s.sol.iterations_or_bisections}};
    j["diagnostics"] = s.diagnostics;
    return j;
}

// Partial diagnostics for a run whose solver gave up.
void write_failure(const RunConfig& cfg, const std::exception& e) {
    json j = {{"status", "failed"}, {"horizon", cfg.horizon.describe()}, {"error", e.what()}};
    if (const auto* fp = dynamic_cast<const FixedPointError*>(&e)) {
        const auto& h = fp->report().residual_history;
        j["iterations"] = fp->report().iterations;
        j["final_damping"] = fp->report().final_damping;
        j["residual_history_tail"] =
            std::vector<double>(h.end() - static_cast<std::ptrdiff_t>(std::min<std::size_t>(h.size(), 20)), h.end());
    }
    try {
        ensure_out_dir(cfg.out);
        write_json(cfg.out / "summary.json", j);
    } catch (const std::exception&) {
        // The solver error is the one worth reporting.
    }
}

// ---- subcommands ----------------------------------------------------------

int cmd_steady_state(const RunConfig& cfg, std::ostream& out) {
    const double y = steady_state(cfg.params);
    out << "y_inf=" << format_shortest(y) << " residual=" << format_shortest(steady_state_residual(cfg.params, y))
        << '\n';
    return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    const Solved s = solve_equilibrium(cfg, cfg.initial().mean());
    ensure_out_dir(cfg.out);
    write_csv(cfg.out / "equilibrium.csv", equilibrium_table(s));
    const json j = summary_json(cfg, s);
    write_json(cfg.out / "summary.json", j);
    out << "value_at_mean=" << format_double(s.sol.value_at_mean)
        << " residual_sup=" << format_double(s.sol.residual_sup)
        << " iterations=" << s.sol.iterations_or_bisections << '\n';
    return kOk;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const InitialDistribution init = cfg.initial();
    const Solved s = solve_equilibrium(cfg, init.mean());
    ensure_out_dir(cfg.out);
    const TimeGrid& g = s.sol.q_hat.grid();
    std::vector<double> t(g.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = g.at(k);
    const std::vector<double> sigmas = cfg.sigmas.empty() ? std::vector<double>{0.001, 0.01, 0.1} : cfg.sigmas;

    bool flagged = false;
    for (double sigma : sigmas) {
        ModelParams p = cfg.params;
        p.sigma = sigma;
        const PathEnsemble ens = simulate_paths(p, s.sol.u_hat, init, cfg.paths, cfg.seed, cfg.store, cfg.threads);
        const SigmaGapRow gap = consistency_gap(ens, s.sol.q_hat);
        CsvTable table{{"s", "q_hat", "mean_path", "std_path"},
                       {t,
                        {s.sol.q_hat.values().begin(), s.sol.q_hat.values().end()},
                        {ens.mean_path.values().begin(), ens.mean_path.values().end()},
                        {ens.std_path.values().begin(), ens.std_path.values().end()}}};
        for (std::size_t i = 0; i < ens.stored_paths.size(); ++i) {
            table.header.push_back("path_" + std::to_string(i + 1));
            table.columns.emplace_back(ens.stored_paths[i].values().begin(), ens.stored_paths[i].values().end());
        }
        const std::string name = "simulate_sigma_" + format_shortest(sigma) + ".csv";
        write_csv(cfg.out / name, table);
        out << "sigma=" << format_shortest(sigma) << " paths=" << cfg.paths << " gap=" << format_double(gap.gap)
            << " max_abs_diff=" << format_double(gap.max_abs_diff) << (gap.flagged ? " FLAGGED" : " ok") << " file="
            << name << '\n';
        flagged = flagged || gap.flagged;
    }
    return flagged ? kValidationFailed : kOk;
}

int cmd_deterministic(const RunConfig& cfg, std::ostream& out) {
    const InitialDensity m0 = cfg.initial_density();
    const Solved s = solve_equilibrium(cfg, m0.first_moment());
    ensure_out_dir(cfg.out);
    CsvTable eq = equilibrium_table(s);
    std::vector<double> means(eq.rows());
    for (std::size_t k = 0; k < means.size(); ++k)
        means[k] = density_mean(cfg.params, m0, s.sol.u_hat, s.sol.q_hat.grid().at(k));
    eq.header.push_back("density_mean");
    eq.columns.push_back(std::move(means));
    write_csv(cfg.out / "deterministic.csv", eq);

    std::vector<double> times = cfg.at;
    if (times.empty()) times = {0.0, 0.5 * cfg.horizon.length, cfg.horizon.length};
    for (double at : times) {
        if (!(at >= 0.0 && at <= cfg.horizon.length))
            throw ConfigError("snapshot time " + format_shortest(at) + " outside the horizon");
        const auto xs = default_x_grid(cfg.params, m0, s.sol.u_hat, at);
        const DensitySnapshot snap = pushforward_density(cfg.params, m0, s.sol.u_hat, at, xs);
        const std::string name = "density_s" + format_shortest(at) + ".csv";
        write_csv(cfg.out / name, CsvTable{{"x", "density"}, {snap.x_grid, snap.values}});
        out << "s=" << format_shortest(at) << " mass=" << format_double(snap.mass())
            << " first_moment=" << format_double(snap.first_moment())
            << " density_mean=" << format_double(density_mean(cfg.params, m0, s.sol.u_hat, at))
            << " q_hat=" << format_double(s.sol.q_hat.interpolate(at)) << " file=" << name << '\n';
    }
    return kOk;
}

// ---- validate -------------------------------------------------------------

struct Check {
    std::string name;
    double measured = 0.0;
    std::string threshold;
    bool pass = false;
    std::string note;
};

class Suite {
public:
    void add(std::string name, double measured, std::string threshold, bool pass, std::string note = {}) {
        checks_.push_back({std::move(name), measured, std::move(threshold), pass, std::move(note)});
    }

    // Runs body; a thrown error is recorded as a failed check.
    template <class Body>
    void guarded(const std::string& name, Body body) {
        try {
            body();
        } catch (const std::exception& e) {
            add(name, std::nan(""), "-", false, std::string("error: ") + e.what());
        }
    }

    int print(std::ostream& out) const {
        std::size_t w = 5;
        for (const auto& c : checks_) w = std::max(w, c.name.size());
        out << std::left << std::setw(static_cast<int>(w)) << "check" << "  " << std::setw(24) << "measured"
            << "  " << std::setw(14) << "threshold" << "  result\n";
        bool all = true;
        for (const auto& c : checks_) {
            out << std::left << std::setw(static_cast<int>(w)) << c.name << "  " << std::setw(24)
                << format_double(c.measured) << "  " << std::setw(14) << c.threshold << "  "
                << (c.pass ? "PASS" : "FAIL");
            if (!c.note.empty()) out << "  " << c.note;
            out << '\n';
            all = all && c.pass;
        }
        out << (all ? "all checks passed" : "some checks FAILED") << '\n';
        return all ? kOk : kValidationFailed;
    }

private:
    std::vector<Check> checks_;
};

bool within_band(const EquilibriumSolution& sol, const AprioriBounds& band, double& worst) {
    worst = 0.0;
    for (std::size_t k = 0; k < sol.q_hat.size(); ++k) {
        const double slack = 1e-12 * band.y_upper[k];
        worst = std::max({worst, band.y_lower[k] - sol.q_hat[k], sol.q_hat[k] - band.y_upper[k]});
        if (sol.q_hat[k] < band.y_lower[k] - slack || sol.q_hat[k] > band.y_upper[k] + slack) return false;
    }
    return true;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
    Suite suite;
    const ModelParams& p = cfg.params;
    const double x = cfg.initial().mean();

    const double y_inf = steady_state(p);
    const double ss_res = std::abs(steady_state_residual(p, y_inf)) / std::pow(y_inf, -p.beta);
    suite.add("steady_state.relative_residual", ss_res, "< 1e-12", ss_res < 1e-12);

    RunConfig fin_cfg = cfg;
    if (cfg.horizon.infinite) {
        fin_cfg.horizon = HorizonSpec{false, 30.0};
        fin_cfg.steps = 0;
    }
    suite.guarded("finite.solve", [&] {
        const Solved s = solve_equilibrium(fin_cfg, x);
        suite.add("finite.fixed_point_residual", s.sol.residual_sup, "< 1e-8", s.sol.residual_sup < 1e-8);
        double worst = 0.0;
        const bool ok = within_band(s.sol, s.band, worst);
        suite.add("finite.apriori_band_violation", std::max(worst, 0.0), "<= 0", ok);
        suite.add("finite.terminal_control", s.sol.u_hat.back(), "== 0", s.sol.u_hat.back() == 0.0);
        const Solved other = solve_equilibrium(fin_cfg, x);
        const bool same = std::equal(s.sol.q_hat.values().begin(), s.sol.q_hat.values().end(),
                                     other.sol.q_hat.values().begin());
        suite.add("finite.rerun_bitwise", same ? 0.0 : 1.0, "== 0", same);

        // Mean-only dependence: a spread-out law with the same mean.
        const auto ln = InitialDistribution::log_normal(x, 0.5);
        const auto [alt, alt_rep] = solve_equilibrium_finite(p, ln, fin_cfg.grid(), cfg.solver);
        const double d = sup_distance(alt.q_hat, s.sol.q_hat);
        suite.add("finite.mean_only_dependence", d, "== 0", d == 0.0);

        ModelParams p0 = p;
        p0.sigma = 0.0;
        const PathEnsemble ens0 = simulate_paths(p0, s.sol.u_hat, InitialDistribution::point_mass(x), 16, cfg.seed, 0);
        const double d0 = sup_distance(ens0.mean_path, s.sol.q_hat);
        suite.add("mc.sigma0_mean_vs_q_hat", d0, "< 1e-8", d0 < 1e-8);

        ModelParams ps = p;
        ps.sigma = p.sigma > 0.0 ? p.sigma : 0.1;
        const PathEnsemble ens = simulate_paths(ps, s.sol.u_hat, cfg.initial(), cfg.paths, cfg.seed, 0, cfg.threads);
        const SigmaGapRow gap = consistency_gap(ens, s.sol.q_hat);
        suite.add("mc.consistency_gap(sigma=" + format_shortest(ps.sigma) + ")", gap.gap, "< 4", !gap.flagged);

        const InitialDensity m0 = InitialDensity::log_normal(x, 0.3);
        const double at = 0.5 * fin_cfg.horizon.length;
        const DensitySnapshot snap =
            pushforward_density(p, m0, s.sol.u_hat, at, default_x_grid(p, m0, s.sol.u_hat, at));
        suite.add("density.mass_error", std::abs(snap.mass() - 1.0), "< 1e-4", std::abs(snap.mass() - 1.0) < 1e-4);
        const double dm = std::abs(snap.first_moment() - density_mean(p, m0, s.sol.u_hat, at));
        suite.add("density.mean_identity", dm, "< 1e-5", dm < 1e-5);
    });

    if (p.admits_infinite_horizon()) {
        RunConfig inf_cfg = cfg;
        if (!cfg.horizon.infinite) {
            inf_cfg.horizon = HorizonSpec{true, 300.0};
            inf_cfg.steps = 0;
        }
        suite.guarded("infinite.solve", [&] {
            const Solved s = solve_equilibrium(inf_cfg, x);
            suite.add("infinite.fixed_point_residual", s.sol.residual_sup, "< 1e-8", s.sol.residual_sup < 1e-8);
            double worst = 0.0;
            const bool ok = within_band(s.sol, s.band, worst);
            suite.add("infinite.apriori_band_violation", std::max(worst, 0.0), "<= 0", ok);
            const double gap = s.diagnostics["terminal_gap"].get<double>();
            suite.add("infinite.terminal_gap", gap, "< tol_steady", gap < cfg.solver.tol_steady);
        });
    } else {
        suite.add("infinite.skipped(beta >= 1 + rho/delta)", p.horizon_margin(), "> 0", true, "not applicable");
    }
    return suite.print(out);
}

// ---- option plumbing --------------------------------------------------------

struct FlagSpec {
    const char* key;
    const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"horizon", "finite:<T> or infinite:<s_max>"},
    {"x0", "mean initial capacity E[xi]"},
    {"rho", "discount rate"},
    {"delta", "depreciation rate"},
    {"beta", "inverse demand elasticity"},
    {"sigma", "volatility; simulate accepts a comma-separated list"},
    {"steps", "number of time steps on the horizon (default 20 per unit time)"},
    {"paths", "Monte Carlo paths"},
    {"seed", "64-bit master seed"},
    {"out", "output directory"},
    {"tol", "fixed-point tolerance"},
    {"max-iter", "fixed-point iteration budget"},
    {"damping", "Picard relaxation in (0, 1]"},
    {"tol-steady", "accepted |q(s_max_extended) - y_inf| for the infinite horizon"},
    {"extension", "extra time integrated beyond s_max"},
    {"init", "initial law: point | lognormal:<mean>,<vol> | uniform:<a>,<b>"},
    {"store", "number of simulated paths written to CSV"},
    {"density", "initial density: lognormal:<mean>,<vol> | uniform:<a>,<b> | table:<csv>"},
    {"at", "comma-separated snapshot times for the density"},
    {"threads", "worker threads for simulation (0 = all cores)"},
};

}  // namespace

HorizonSpec HorizonSpec::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ConfigError("horizon must be finite:<T> or infinite:<s_max>, got '" + text + "'");
    const std::string kind = trim(text.substr(0, colon));
    const double len = parse_double("horizon", text.substr(colon + 1));
    if (!(len > 0.0)) throw ConfigError("horizon length must be positive");
    if (kind == "finite") return {false, len};
    if (kind == "infinite") return {true, len};
    throw ConfigError("unknown horizon kind '" + kind + "'");
}

std::string HorizonSpec::describe() const {
    return (infinite ? "infinite:" : "finite:") + format_shortest(length);
}

InitialDistribution RunConfig::initial() const {
    if (init == "point") return InitialDistribution::point_mass(x0);
    const std::string family = trim(init.substr(0, init.find(':')));
    if (family == "lognormal") {
        const auto [name, a] = parse_family("init", init, 2);
        return InitialDistribution::log_normal(a[0], a[1]);
    }
    if (family == "uniform") {
        const auto [name, a] = parse_family("init", init, 2);
        return InitialDistribution::uniform(a[0], a[1]);
    }
    throw ConfigError("unknown initial law '" + init + "'");
}

InitialDensity RunConfig::initial_density() const {
    if (density.empty()) return InitialDensity::log_normal(x0, 0.3);
    const std::string family = trim(density.substr(0, density.find(':')));
    if (family == "table") {
        const CsvTable t = read_csv(trim(density.substr(density.find(':') + 1)));
        return InitialDensity::tabulated(t.column("x"), t.column("p"));
    }
    const auto [name, a] = parse_family("density", density, 2);
    if (name == "lognormal") return InitialDensity::log_normal(a[0], a[1]);
    if (name == "uniform") return InitialDensity::uniform(a[0], a[1]);
    throw ConfigError("unknown density '" + density + "'");
}

TimeGrid RunConfig::grid() const {
    return TimeGrid(horizon.length, steps ? steps : default_steps(horizon.length));
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : kFlags) k.emplace_back(f.key);
        return k;
    }();
    return keys;
}

Settings read_config_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path.string());
    Settings s;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
        s[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return s;
}

RunConfig build_config(const Settings& settings) {
    RunConfig c;
    for (const auto& [key, value] : settings) {
        if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
            throw ConfigError("unknown configuration key '" + key + "'");
        if (key == "horizon") c.horizon = HorizonSpec::parse(value);
        else if (key == "x0") c.x0 = parse_double(key, value);
        else if (key == "rho") c.params.rho = parse_double(key, value);
        else if (key == "delta") c.params.delta = parse_double(key, value);
        else if (key == "beta") c.params.beta = parse_double(key, value);
        else if (key == "sigma") {
            c.sigmas = parse_list(key, value);
            c.params.sigma = c.sigmas.front();
        } else if (key == "steps") c.steps = parse_int<std::size_t>(key, value);
        else if (key == "paths") c.paths = parse_int<std::size_t>(key, value);
        else if (key == "seed") c.seed = parse_int<std::uint64_t>(key, value);
        else if (key == "out") c.out = value;
        else if (key == "tol") c.solver.tol_fixed_point = parse_double(key, value);
        else if (key == "max-iter") c.solver.max_iterations = parse_int<int>(key, value);
        else if (key == "damping") c.solver.damping = parse_double(key, value);
        else if (key == "tol-steady") c.solver.tol_steady = parse_double(key, value);
        else if (key == "extension") c.solver.horizon_extension = parse_double(key, value);
        else if (key == "init") c.init = value;
        else if (key == "store") c.store = parse_int<std::size_t>(key, value);
        else if (key == "density") c.density = value;
        else if (key == "at") c.at = parse_list(key, value);
        else if (key == "threads") c.threads = parse_int<unsigned>(key, value);
    }
    c.solver.rng_seed = c.seed;
    if (c.steps == 1) throw ConfigError("steps must be at least 2");
    if (c.paths < 2) throw ConfigError("paths must be at least 2");
    c.params.validate();
    for (double s : c.sigmas)
        if (!(s >= 0.0)) throw DomainError("sigma must be nonnegative");
    c.solver.validate();
    // Fail before any work when the horizon is not admissible.
    if (c.horizon.infinite) c.params.require_infinite_horizon();
    (void)c.initial();
    return c;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field equilibrium of the capacity investment game"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    std::string config_path;
    app.add_option("--config", config_path, "key = value file; flags override it");
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> given;
    for (const auto& f : kFlags) given[f.key] = app.add_option(std::string("--") + f.key, raw[f.key], f.help);

    auto* steady = app.add_subcommand("steady-state", "print y_inf and the residual of its defining equation");
    auto* solve = app.add_subcommand("solve", "write equilibrium.csv and summary.json");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths under the equilibrium control");
    auto* deterministic = app.add_subcommand("deterministic", "density transport under the equilibrium control");
    auto* validate = app.add_subcommand("validate", "run the invariant suite and print a pass/fail table");

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }

    RunConfig cfg;
    try {
        Settings settings;
        if (!config_path.empty()) settings = read_config_file(config_path);
        for (const auto& [key, opt] : given)
            if (opt->count() > 0) settings[key] = raw[key];
        cfg = build_config(settings);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }

    try {
        if (steady->parsed()) return cmd_steady_state(cfg, out);
        if (solve->parsed()) return cmd_solve(cfg, out);
        if (simulate->parsed()) return cmd_simulate(cfg, out);
        if (deterministic->parsed()) return cmd_deterministic(cfg, out);
        if (validate->parsed()) return cmd_validate(cfg, out);
    } catch (const ConvergenceError& e) {
        write_failure(cfg, e);
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailed;
    } catch (const ShootingError& e) {
        write_failure(cfg, e);
        err << "solver failure: " << e.what() << '\n';
        return kSolverFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kBadInput;
    }
    return kBadInput;
}

}  // namespace mfgcap::cli
