#include "fracreg/cli/catalog.hpp"
#include "fracreg/cli/config.hpp"
#include "fracreg/cli/csv.hpp"
#include "fracreg/cli/runner.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;
using namespace fracreg::cli;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("fracreg_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int tool(const std::string& args)
{
    const std::string cmd = std::string(FRACREG_TOOL) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("INI configuration is parsed and strict")
{
    RunConfig cfg;
    apply_ini_text(cfg, "[run]\nseed = 9\n[problem]\nalpha = 0.25\nu0 = sine-2\n[scheme]\nN = 64\n"
                        "[convergence]\nN = 32, 64\n");
    CHECK(cfg.seed == 9);
    CHECK(cfg.problem.alpha == 0.25);
    CHECK(cfg.problem.u0 == "sine-2");
    CHECK(cfg.scheme.N == 64);
    CHECK(cfg.Ns == std::vector<std::size_t>{32, 64});

    RunConfig bad;
    CHECK_THROWS_AS(apply_ini_text(bad, "[problem]\nbeta = 1\n"), ConfigError);
    CHECK_THROWS_AS(apply_ini_text(bad, "[scheme]\nN = many\n"), ConfigError);
    CHECK_THROWS_AS(apply_ini_text(bad, "[scheme]\nN = -4\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), IoError);
}

TEST_CASE("config hash is stable and sensitive")
{
    RunConfig a, b;
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    b.problem.alpha = 0.3;
    CHECK(a.hash() != b.hash());
    // FNV-1a reference values.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    const auto lines = a.canonical();
    CHECK(std::is_sorted(lines.begin(), lines.end()));
}

TEST_CASE("list splitting trims and drops empties")
{
    CHECK(split_list(" 2.2, gronwall ,,positivity") == std::vector<std::string>{"2.2", "gronwall", "positivity"});
}

TEST_CASE("catalog builds problems")
{
    ProblemConfig pc;
    auto p = build_problem(pc);
    CHECK(p.u0_regularity_mu == 2);
    CHECK(p.coeffs.constant_diffusion_only());
    pc.u0 = "indicator-one";
    pc.F = "sin(pi x)*(1+t)";
    pc.a = "one";
    p = build_problem(pc);
    CHECK(p.u0_regularity_mu == 0.5);
    CHECK(!p.coeffs.constant_diffusion_only());
    CHECK(p.coeffs.dF(0.5, 0.3) == doctest::Approx(1));
    pc.g = "power-sine";
    pc.g_eta = 0.5;
    p = build_problem(pc);
    CHECK(p.source.separable());
    CHECK(p.source_M > 0);
    pc.u0 = "sine-0";
    CHECK_THROWS_AS(build_problem(pc), ConfigError);
    pc.u0 = "sine-1";
    pc.kappa = "two";
    CHECK_THROWS_AS(build_problem(pc), ConfigError);
    CHECK(catalog_names("u0").size() == 3);
    CHECK(catalog_names("nothing").empty());
}

TEST_CASE("csv writer quotes and appends the config hash")
{
    const auto dir = scratch("csv");
    const auto path = (dir / "t.csv").string();
    {
        CsvWriter w(path, {"a", "b"}, "0123456789abcdef");
        w.row({"x", "{\"k\":1,\"j\":2}"});
        CHECK_THROWS(w.row({"only-one"}));
        w.close();
    }
    const auto t = read_csv(path);
    CHECK(t.header == std::vector<std::string>{"a", "b", "config_hash"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0][1] == "{\"k\":1,\"j\":2}");
    CHECK(t.rows[0][2] == "0123456789abcdef");
    CHECK(t.column("b") == 1);
    CHECK(t.column("z") == -1);
    CHECK(num(0.1) == "0.1");
    CHECK_THROWS_AS(CsvWriter("/nonexistent/dir/x.csv", {"a"}, "h"), IoError);
}

TEST_CASE("identities command writes results and a manifest")
{
    const auto dir = scratch("identities");
    CHECK(tool("identities --max-m 3 --out " + dir.string()) == 0);
    const auto t = read_csv((dir / "identities.csv").string());
    CHECK(t.rows.size() > 10);
    const int pass = t.column("pass");
    for (const auto& r : t.rows)
        CHECK(r[static_cast<std::size_t>(pass)] == "true");
    std::ifstream in(dir / "manifest.json");
    const auto m = nlohmann::json::parse(in);
    CHECK(m["command"] == "identities");
    CHECK(m["config_hash"].get<std::string>().size() == 16);
    CHECK(m.contains("wall_clock_seconds"));
    CHECK(m["checks"].size() == 1);
}

TEST_CASE("rates command reproduces the fractional-derivative exponent")
{
    const auto dir = scratch("rates");
    CHECK(tool("rates --theorem cor3.4 --alpha 0.5 --m 1 --N 128 --n-x 32 --out " + dir.string()) == 0);
    const auto t = read_csv((dir / "rates.csv").string());
    REQUIRE(t.rows.size() == 1);
    const auto& r = t.rows[0];
    CHECK(std::stod(r[static_cast<std::size_t>(t.column("predicted"))]) == doctest::Approx(-0.5));
    CHECK(std::stod(r[static_cast<std::size_t>(t.column("measured"))]) == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(r[static_cast<std::size_t>(t.column("pass"))] == "true");
}

TEST_CASE("inequalities command and report")
{
    const auto dir = scratch("ineq");
    CHECK(tool("inequalities --suite 2.4,gronwall --count 4 --N 64 --out " + dir.string()) == 0);
    const auto t = read_csv((dir / "inequalities.csv").string());
    CHECK(!t.rows.empty());
    CHECK(t.column("params_json") >= 0);
    CHECK(tool("report --out " + dir.string()) == 0);
}

TEST_CASE("exit codes for bad usage and unwritable output")
{
    const auto dir = scratch("codes");
    CHECK(tool("inequalities --out " + dir.string()) == 2);
    CHECK(tool("no-such-command") == 2);
    CHECK(tool("rates --theorem thm9.9 --out " + dir.string()) == 2);
    CHECK(tool("solve --alpha 1.5 --out " + dir.string()) == 2);
    CHECK(tool("--config /nonexistent.ini identities") == 3);
    CHECK(tool("identities --max-m 1 --out /proc/forbidden/out") == 3);
}

TEST_CASE("solve command through the library entry point")
{
    const auto dir = scratch("solve");
    RunConfig cfg;
    cfg.command = "solve";
    cfg.out = dir.string();
    cfg.scheme.N = 16;
    cfg.scheme.n_x = 8;
    std::vector<CheckSummary> summary;
    CHECK(run(cfg, summary) == ok);
    REQUIRE(summary.size() == 1);
    CHECK(summary[0].failed == 0);
    const auto t = read_csv((dir / "trajectory.csv").string());
    CHECK(t.rows.size() == 17 * 7);
}
