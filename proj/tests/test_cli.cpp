#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "mfgcap/cli.hpp"
#include "mfgcap/csv.hpp"

namespace fs = std::filesystem;
using namespace mfgcap;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Fresh directory under the system temp dir, removed on scope exit.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("mfgcap_cli_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    [[nodiscard]] std::string str() const { return path.string(); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("steady-state output") {
    auto r = invoke({"steady-state"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("y_inf=13.5720880829745", 0) == 0);

    r = invoke({"--rho", "1.5", "--delta", "0.5", "steady-state"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("y_inf=1.0 ", 0) == 0);

    // Flags may follow the subcommand too.
    r = invoke({"steady-state", "--beta", "1", "--rho", "0.03", "--delta", "0.01"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("y_inf=50", 0) == 0);
}

TEST_CASE("bad input exits with code 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"--rho", "-1", "steady-state"}).code == 2);
    CHECK(invoke({"--rho", "abc", "steady-state"}).code == 2);
    CHECK(invoke({"--horizon", "sideways:3", "solve"}).code == 2);
    CHECK(invoke({"--config", "/nonexistent/file.cfg", "steady-state"}).code == 2);

    const auto r = invoke({"--beta", "5", "--horizon", "infinite:100", "solve"});
    CHECK(r.code == 2);
    CHECK(r.err.find("beta") != std::string::npos);
}

TEST_CASE("solve writes a table that round-trips") {
    ScratchDir dir("solve");
    const auto r = invoke({"solve", "--horizon", "finite:3", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const CsvTable t = read_csv(dir.path / "equilibrium.csv");
    CHECK(t.header == std::vector<std::string>{"s", "z", "q_hat", "u_hat", "lower_bound", "upper_bound"});
    CHECK(t.rows() == 61);
    const auto& q = t.column("q_hat");
    const auto& u = t.column("u_hat");
    const auto& s = t.column("s");
    CHECK(q.front() == 10.0);
    CHECK(u.back() == 0.0);
    CHECK(s.back() == 3.0);
    for (std::size_t k = 1; k < q.size(); ++k) CHECK(q[k] < q[k - 1]);
    for (std::size_t k = 0; k < q.size(); ++k) {
        CHECK(t.column("lower_bound")[k] <= q[k]);
        CHECK(q[k] <= t.column("upper_bound")[k]);
        CHECK(t.column("z")[k] == doctest::Approx(std::exp(0.01 * s[k]) * q[k]).epsilon(1e-15));
    }
    const auto j = read_json(dir.path / "summary.json");
    CHECK(j["status"] == "ok");
    CHECK(j["residual_sup"].get<double>() < 1e-8);

    // Same input, same bytes.
    const std::string first = slurp(dir.path / "equilibrium.csv");
    REQUIRE(invoke({"solve", "--horizon", "finite:3", "--out", dir.str()}).code == 0);
    CHECK(slurp(dir.path / "equilibrium.csv") == first);
}

TEST_CASE("infinite horizon solve ends near the steady state") {
    ScratchDir dir("infinite");
    const auto r = invoke({"solve", "--horizon", "infinite:400", "--out", dir.str()});
    REQUIRE(r.code == 0);
    const CsvTable t = read_csv(dir.path / "equilibrium.csv");
    CHECK(std::abs(t.column("q_hat").back() - 13.572088082974531) < 1e-3);
    const auto j = read_json(dir.path / "summary.json");
    CHECK(j["horizon"] == "infinite:400.0");
    CHECK(j["diagnostics"]["terminal_gap"].get<double>() < 1e-3);
}

TEST_CASE("solver failure exits with code 3 and leaves diagnostics") {
    ScratchDir dir("fail");
    const auto r = invoke({"solve", "--horizon", "finite:30", "--tol", "1e-30", "--max-iter", "50", "--out", dir.str()});
    CHECK(r.code == 3);
    const auto j = read_json(dir.path / "summary.json");
    CHECK(j["status"] == "failed");
    CHECK(j["iterations"] == 50);
    CHECK_FALSE(j["residual_history_tail"].empty());
}

TEST_CASE("config file with flag precedence") {
    ScratchDir dir("config");
    const fs::path cfg = dir.path / "run.cfg";
    std::ofstream(cfg) << "# comment line\nbeta = 1\nrho = 0.03   # trailing comment\ndelta = 0.01\n";
    auto r = invoke({"--config", cfg.string(), "steady-state"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("y_inf=50", 0) == 0);
    r = invoke({"--config", cfg.string(), "--beta", "2", "steady-state"});
    CHECK(r.out.rfind("y_inf=13.57208808", 0) == 0);

    std::ofstream(dir.path / "bad.cfg") << "bogus_key = 3\n";
    CHECK(invoke({"--config", (dir.path / "bad.cfg").string(), "steady-state"}).code == 2);

    cli::Settings s{{"horizon", "finite:12"}, {"x0", "7"}};
    const cli::RunConfig c = cli::build_config(s);
    CHECK(c.horizon.length == 12.0);
    CHECK(c.grid().n_steps() == 240);
    CHECK(c.x0 == 7.0);
    CHECK_THROWS_AS(cli::build_config({{"nope", "1"}}), ConfigError);
    for (const auto& key : {"rho", "delta", "beta", "sigma", "horizon", "x0", "seed", "paths"})
        CHECK(std::find(cli::known_keys().begin(), cli::known_keys().end(), key) != cli::known_keys().end());
}

TEST_CASE("horizon specs") {
    const auto f = cli::HorizonSpec::parse("finite:30");
    CHECK_FALSE(f.infinite);
    CHECK(f.length == 30.0);
    const auto i = cli::HorizonSpec::parse("infinite:400");
    CHECK(i.infinite);
    CHECK(cli::HorizonSpec::parse(i.describe()).length == 400.0);
    CHECK_THROWS_AS(cli::HorizonSpec::parse("finite:-1"), ConfigError);
    CHECK_THROWS_AS(cli::HorizonSpec::parse("finite"), ConfigError);
}

TEST_CASE("simulate without noise reproduces the equilibrium") {
    ScratchDir dir("simulate");
    const auto r = invoke({"simulate", "--horizon", "finite:10", "--sigma", "0,0.1", "--paths", "2000", "--out", dir.str()});
    CHECK(r.code == 0);
    const CsvTable flat = read_csv(dir.path / "simulate_sigma_0.0.csv");
    const auto& q = flat.column("q_hat");
    const auto& m = flat.column("mean_path");
    for (std::size_t k = 0; k < q.size(); ++k) CHECK(std::abs(q[k] - m[k]) < 1e-8);
    const CsvTable noisy = read_csv(dir.path / "simulate_sigma_0.1.csv");
    CHECK(noisy.header.size() == 4 + 10);
    CHECK(noisy.column("std_path").back() > 0.0);
    CHECK(r.out.find("FLAGGED") == std::string::npos);
}

TEST_CASE("deterministic subcommand") {
    ScratchDir dir("det");
    const auto r = invoke({"deterministic", "--horizon", "finite:30", "--density", "lognormal:10,0.2", "--at", "0,15",
                           "--out", dir.str()});
    REQUIRE(r.code == 0);
    const CsvTable t = read_csv(dir.path / "deterministic.csv");
    for (std::size_t k = 0; k < t.rows(); ++k)
        CHECK(t.column("density_mean")[k] == doctest::Approx(t.column("q_hat")[k]).epsilon(1e-9));
    const CsvTable snap = read_csv(dir.path / "density_s15.0.csv");
    CHECK(snap.header == std::vector<std::string>{"x", "density"});
    CHECK(snap.rows() == 2001);
    CHECK(invoke({"deterministic", "--horizon", "finite:30", "--density", "uniform:5,15", "--at", "31", "--out",
                  dir.str()})
              .code == 2);
}

TEST_CASE("validate") {
    auto r = invoke({"validate", "--horizon", "finite:30"});
    CHECK(r.code == 0);
    CHECK(r.out.find("FAIL") == std::string::npos);
    r = invoke({"validate", "--horizon", "finite:30", "--tol", "1e-30", "--max-iter", "20"});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL") != std::string::npos);
}
