#include "fracreg/cli/runner.hpp"
#include "fracreg/cli/catalog.hpp"
#include "fracreg/cli/csv.hpp"
#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"
#include "fracreg/identities.hpp"
#include "fracreg/quadfunc.hpp"
#include "fracreg/regverify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

namespace fracreg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* artifact_version = "0.1.0";

std::string pass_str(bool p)
{
    return p ? "true" : "false";
}

// Runs tasks on up to `jobs` threads; results keep task order.
template <class R>
std::vector<R> run_pool(const std::vector<std::function<R()>>& tasks, unsigned jobs)
{
    std::vector<R> out(tasks.size());
    std::vector<std::exception_ptr> errs(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                out[i] = tasks[i]();
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n; ++i)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
    return out;
}

std::string path_in(const RunConfig& cfg, const std::string& name)
{
    return (fs::path(cfg.out) / name).string();
}

// --------------------------------------------------------------------------------------------

CheckSummary cmd_identities(const RunConfig& cfg)
{
    if (cfg.max_m < 1 || cfg.max_m > 12)
        throw ConfigError("identities: max_m must lie in [1, 12]");
    const auto rows = identities::run_suite(cfg.max_m, cfg.identity_tol);
    CsvWriter w(path_in(cfg, "identities.csv"), {"identity_id", "m", "q_or_mu", "residual", "pass"}, cfg.hash());
    CheckSummary s{"identities"};
    for (const auto& r : rows) {
        w.row({r.identity_id, num(static_cast<long long>(r.m)), r.q_or_mu, num(r.residual), pass_str(r.pass)});
        ++s.total;
        s.failed += !r.pass;
    }
    w.close();
    return s;
}

struct IneqRow {
    std::string id;
    json params;
    double lhs, rhs, margin;
    bool pass;
};

std::vector<IneqRow> run_suite_rows(const std::string& suite, const RunConfig& cfg)
{
    std::vector<IneqRow> rows;
    auto add_reports = [&](const std::vector<quad::IneqReport>& reps) {
        for (const auto& r : reps)
            rows.push_back({r.id, json(r.params), r.lhs, r.rhs, r.margin, !r.violated()});
    };
    if (suite == "positivity") {
        add_reports(quad::positivity_suite(cfg.seed, cfg.count * 2, {0, 0.25, 0.5, 0.75, 1}, cfg.suite_N));
    } else if (suite == "2.2" || suite == "2.3" || suite == "2.4") {
        quad::LemmaSuiteConfig lc;
        lc.seed = cfg.seed;
        lc.count = cfg.count;
        lc.N = cfg.suite_N;
        add_reports(quad::lemma_suite(suite, lc));
    } else if (suite == "gronwall") {
        const auto reps = quad::gronwall_suite(cfg.seed, cfg.count / 2, cfg.suite_N);
        for (std::size_t i = 0; i < reps.size(); ++i) {
            const auto& r = reps[i];
            rows.push_back({"gronwall", json{{"sample", i}, {"premise_defect", r.premise_defect}}, r.max_excess, 0.0,
                            -r.max_excess, r.premise_holds && !r.violated});
        }
        // Equality case a = b = 1, beta = 1/2 against e^t (1 + erf(sqrt t)).
        const GradedMesh mesh(1.0, cfg.suite_N, 2.0);
        const Series q = Series::sample(mesh, [](double t) { return std::exp(t) * (1 + std::erf(std::sqrt(t))); });
        const auto g = quad::gronwall_bound([](double) { return 1.0; }, [](double) { return 1.0; }, 0.5, q);
        const double gap = (g.bound.values() - q.values()).cwiseAbs().maxCoeff();
        rows.push_back({"gronwall-equality", json{{"a", 1}, {"b", 1}, {"beta", 0.5}}, gap, 1e-6, 1e-6 - gap,
                        gap <= 1e-6});
    } else {
        throw ConfigError("inequalities: unknown suite '" + suite + "'");
    }
    return rows;
}

CheckSummary cmd_inequalities(const RunConfig& cfg)
{
    std::vector<std::string> suites = cfg.suites;
    if (suites.size() == 1 && suites[0] == "all")
        suites = {"positivity", "2.2", "2.3", "2.4", "gronwall"};
    if (suites.empty())
        throw ConfigError("inequalities: no suite selected");
    if (cfg.count < 1)
        throw ConfigError("inequalities: count must be >= 1");
    std::vector<std::function<std::vector<IneqRow>()>> tasks;
    for (const auto& s : suites) {
        if (s != "positivity" && s != "2.2" && s != "2.3" && s != "2.4" && s != "gronwall")
            throw ConfigError("inequalities: unknown suite '" + s + "'");
        tasks.push_back([s, &cfg] { return run_suite_rows(s, cfg); });
    }
    const auto results = run_pool(tasks, cfg.jobs);
    CsvWriter w(path_in(cfg, "inequalities.csv"), {"check_id", "params_json", "lhs", "rhs", "margin", "pass"},
                cfg.hash());
    CheckSummary s{"inequalities"};
    for (const auto& rows : results)
        for (const auto& r : rows) {
            w.row({r.id, r.params.dump(), num(r.lhs), num(r.rhs), num(r.margin), pass_str(r.pass)});
            ++s.total;
            s.failed += !r.pass;
        }
    w.close();
    return s;
}

solver::SchemeConfig scheme_of(const RunConfig& cfg)
{
    solver::SchemeConfig s;
    s.N = cfg.scheme.N;
    s.gamma = cfg.scheme.gamma;
    s.n_x = cfg.scheme.n_x;
    return s;
}

CheckSummary cmd_solve(const RunConfig& cfg)
{
    const auto problem = build_problem(cfg.problem);
    const auto scheme = scheme_of(cfg);
    std::string method = cfg.scheme.method;
    const bool modal = problem.coeffs.constant_diffusion_only() && problem.source.is_zero();
    if (method == "auto")
        method = modal ? "spectral" : "weak";
    solver::Trajectory tr = [&] {
        if (method == "weak")
            return solver::solve_weak(problem, scheme);
        if (method == "spectral") {
            if (!modal)
                throw ConfigError("solve: the spectral method needs F = G = a = b = 0 and g = 0");
            return solver::solve_spectral_const(problem, scheme, cfg.scheme.modes);
        }
        throw ConfigError("solve: unknown method '" + method + "'");
    }();
    for (const auto& wmsg : tr.warnings)
        std::cerr << "warning: " << wmsg << "\n";
    CsvWriter w(path_in(cfg, "trajectory.csv"), {"t", "dof_index", "value"}, cfg.hash());
    const auto& U = tr.states.values();
    for (std::size_t n = 0; n < tr.mesh.size(); ++n)
        for (Eigen::Index i = 0; i < U.rows(); ++i)
            w.row({num(tr.mesh[n]), num(static_cast<long long>(i)), num(U(i, static_cast<Eigen::Index>(n)))});
    w.close();
    CheckSummary s{"solve"};
    s.total = 2;
    s.failed += !U.allFinite();
    s.failed += reg::initial_memory_terms(problem, tr) != 0.0;
    return s;
}

struct Experiment {
    std::string id;
    reg::RateQuery query;
    std::function<void(ProblemConfig&, solver::SchemeConfig&)> adjust;
};

std::vector<Experiment> builtin_experiments()
{
    auto sine = [](ProblemConfig& p, solver::SchemeConfig&) { p.u0 = "sine-1"; };
    auto rough = [](ProblemConfig& p, solver::SchemeConfig&) { p.u0 = "indicator-one"; };
    return {
        {"perturbed-dt", {"thm4.2", "dt", 1, 0, false},
         [](ProblemConfig& p, solver::SchemeConfig& s) {
             p.u0 = "sine-1";
             p.F = "sin(pi x)*(1+t)";
             p.a = "one";
             s.n_x = std::min<std::size_t>(s.n_x, 64);
         }},
        {"rough-dt", {"thm4.2", "dt", 1, 0, true}, rough},
        {"rough-inc", {"thm4.2", "inc", 0, 0, true}, rough},
        {"rough-norm2", {"thm4.1", "dt-norm", 0, 2, true}, rough},
        {"sine-dt", {"thm4.2", "dt", 1, 0, false}, sine},
        {"sine-frac", {"cor3.4", "frac", 1, 0, false}, sine},
        {"sine-frac-inc", {"thm4.2", "frac-inc", 1, 0, false}, sine},
        {"sine-inc", {"thm4.2", "inc", 0, 0, false}, sine},
    };
}

std::string default_quantity(const std::string& theorem)
{
    if (theorem == "cor3.4")
        return "frac";
    if (theorem == "thm4.2")
        return "dt";
    if (theorem == "thm4.1" || theorem == "thm4.3")
        return "dt-norm";
    throw ConfigError("rates: unknown theorem '" + theorem + "'");
}

CheckSummary cmd_rates(const RunConfig& cfg)
{
    std::vector<Experiment> list;
    if (cfg.theorem) {
        reg::RateQuery q;
        q.theorem = *cfg.theorem;
        q.quantity = cfg.quantity.value_or(default_quantity(q.theorem));
        q.m = cfg.m.value_or(q.quantity == "inc" ? 0 : 1);
        q.nu = cfg.nu.value_or(q.quantity == "dt-norm" ? 2.0 : 0.0);
        q.edge = cfg.problem.u0 == "indicator-one";
        list.push_back({q.theorem + "-" + q.quantity, q, {}});
    } else {
        const auto all = builtin_experiments();
        if (cfg.experiments.empty()) {
            list = all;
        } else {
            for (const auto& id : cfg.experiments) {
                auto it = std::find_if(all.begin(), all.end(), [&](const Experiment& e) { return e.id == id; });
                if (it == all.end())
                    throw ConfigError("rates: unknown experiment '" + id + "'");
                list.push_back(*it);
            }
        }
    }
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::vector<std::function<reg::RateReport()>> tasks;
    for (const auto& e : list) {
        ProblemConfig pc = cfg.problem;
        solver::SchemeConfig sc = scheme_of(cfg);
        if (e.adjust)
            e.adjust(pc, sc);
        const auto problem = build_problem(pc);
        try {
            reg::predicted_exponent(e.query, problem.alpha, problem.u0_regularity_mu);
        } catch (const HypothesisViolation& ex) {
            throw ConfigError(ex.what());
        }
        tasks.push_back([e, problem, sc, tol = cfg.rate_tol] { return reg::verify_rate(e.query, problem, sc, tol); });
    }
    const auto reports = run_pool(tasks, cfg.jobs);
    CsvWriter w(path_in(cfg, "rates.csv"),
                {"experiment_id", "theorem", "alpha", "mu", "m", "predicted", "measured", "stderr", "window_lo",
                 "window_hi", "pass"},
                cfg.hash());
    CheckSummary s{"rates"};
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        w.row({list[i].id, r.query.theorem, num(r.alpha), num(r.mu), num(static_cast<long long>(r.query.m)),
               num(r.predicted), num(r.estimate.exponent), num(r.estimate.stderr_), num(r.estimate.t_lo),
               num(r.estimate.t_hi), pass_str(r.pass)});
        ++s.total;
        s.failed += !r.pass;
    }
    w.close();
    return s;
}

CheckSummary cmd_convergence(const RunConfig& cfg)
{
    const auto problem = build_problem(cfg.problem);
    if (!problem.coeffs.constant_diffusion_only() || !problem.source.is_zero())
        throw ConfigError("convergence: the modal reference needs F = G = a = b = 0 and g = 0");
    if (cfg.Ns.size() < 2)
        throw ConfigError("convergence: need at least two values of N");
    const auto rep = reg::convergence(problem, scheme_of(cfg), cfg.Ns);
    CsvWriter w(path_in(cfg, "convergence.csv"), {"experiment_id", "N", "error", "order", "pass"}, cfg.hash());
    const bool pass = rep.order >= 1.0;
    for (std::size_t i = 0; i < rep.N.size(); ++i)
        w.row({"weak-vs-modal", num(static_cast<long long>(rep.N[i])), num(rep.error[i]), num(rep.order),
               pass_str(pass)});
    w.close();
    return CheckSummary{"convergence", 1, pass ? 0 : 1};
}

CheckSummary cmd_report(const RunConfig& cfg)
{
    CheckSummary s{"report"};
    bool any = false;
    for (const char* name : {"identities.csv", "inequalities.csv", "rates.csv", "convergence.csv"}) {
        const auto path = path_in(cfg, name);
        if (!fs::exists(path))
            continue;
        any = true;
        const CsvTable t = read_csv(path);
        const int col = t.column("pass");
        if (col < 0)
            throw IoError(path + ": no pass column");
        int failed = 0;
        for (const auto& r : t.rows)
            failed += static_cast<std::size_t>(col) >= r.size() || r[static_cast<std::size_t>(col)] != "true";
        std::cout << name << ": " << t.rows.size() - static_cast<std::size_t>(failed) << "/" << t.rows.size()
                  << " pass\n";
        s.total += static_cast<int>(t.rows.size());
        s.failed += failed;
    }
    if (!any)
        throw IoError("report: no result files in '" + cfg.out + "'");
    return s;
}

void write_manifest(const RunConfig& cfg, const std::vector<CheckSummary>& summary, double seconds,
                    const std::string& started)
{
    json checks = json::array();
    for (const auto& c : summary)
        checks.push_back({{"name", c.name}, {"total", c.total}, {"failed", c.failed}, {"pass", c.failed == 0}});
    const json m = {{"config_hash", cfg.hash()},
                    {"artifact_version", artifact_version},
                    {"command", cfg.command},
                    {"seed", cfg.seed},
                    {"started_utc", started},
                    {"wall_clock_seconds", seconds},
                    {"config", cfg.canonical()},
                    {"checks", checks}};
    std::ofstream out(path_in(cfg, "manifest.json"));
    out << m.dump(2) << "\n";
    if (!out)
        throw IoError("cannot write manifest in '" + cfg.out + "'");
}

} // namespace

ExitCode run(const RunConfig& cfg, std::vector<CheckSummary>& summary)
{
    const auto t0 = std::chrono::steady_clock::now();
    char started[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(started, sizeof started, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec)
        throw IoError("cannot create output directory '" + cfg.out + "': " + ec.message());

    CheckSummary s;
    if (cfg.command == "identities")
        s = cmd_identities(cfg);
    else if (cfg.command == "inequalities")
        s = cmd_inequalities(cfg);
    else if (cfg.command == "solve")
        s = cmd_solve(cfg);
    else if (cfg.command == "rates")
        s = cmd_rates(cfg);
    else if (cfg.command == "convergence")
        s = cmd_convergence(cfg);
    else if (cfg.command == "report")
        s = cmd_report(cfg);
    else
        throw ConfigError("unknown command '" + cfg.command + "'");
    summary.push_back(s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(cfg, summary, secs, started);
    for (const auto& c : summary)
        if (c.failed > 0)
            return check_failed;
    return ok;
}

int main_entry(int argc, char** argv)
{
    CLI::App app{"fracreg: fractional diffusion regularity laboratory"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    std::string config_path, out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> jobs;
    app.add_option("--config", config_path, "INI run configuration");
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--jobs", jobs, "worker threads");

    std::optional<int> max_m, count, m;
    std::optional<std::size_t> N, n_x, suite_N;
    std::optional<double> alpha, gamma, nu, T, tol;
    std::vector<std::string> suites, experiments;
    std::optional<std::string> theorem, quantity, method, u0;
    std::vector<std::size_t> Ns;

    auto* c_id = app.add_subcommand("identities", "commutator tables and identity residuals");
    c_id->add_option("--max-m", max_m, "largest order");
    auto* c_in = app.add_subcommand("inequalities", "randomized inequality suites");
    c_in->add_option("--suite", suites, "positivity, 2.2, 2.3, 2.4, gronwall or all")->delimiter(',');
    c_in->add_option("--count", count, "inputs per suite");
    c_in->add_option("--N", suite_N, "time steps of the random inputs");
    auto* c_so = app.add_subcommand("solve", "write a trajectory");
    auto* c_ra = app.add_subcommand("rates", "measure decay exponents");
    c_ra->add_option("--theorem", theorem, "cor3.4, thm4.1, thm4.2 or thm4.3");
    c_ra->add_option("--quantity", quantity, "dt, dt-norm, grad-dt, frac, frac-inc or inc");
    c_ra->add_option("--m", m, "number of time derivatives");
    c_ra->add_option("--nu", nu, "norm index for dt-norm");
    c_ra->add_option("--experiment", experiments, "built-in experiment ids")->delimiter(',');
    c_ra->add_option("--tol", tol, "exponent tolerance");
    auto* c_cv = app.add_subcommand("convergence", "weak solver against the modal solution");
    c_cv->add_option("--Ns", Ns, "time step counts")->delimiter(',');
    app.add_subcommand("report", "summarize result files in the output directory");
    for (auto* sc : {c_so, c_ra, c_cv}) {
        sc->add_option("--alpha", alpha, "fractional order");
        sc->add_option("--T", T, "final time");
        sc->add_option("--u0", u0, "initial data");
        sc->add_option("--N", N, "time steps");
        sc->add_option("--n-x", n_x, "space cells");
        sc->add_option("--gamma", gamma, "mesh grading");
    }
    c_so->add_option("--method", method, "auto, weak or spectral");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage_error;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (auto subs = app.get_subcommands(); !subs.empty())
            cfg.command = subs.front()->get_name();
        if (cfg.command.empty()) {
            std::cerr << app.help();
            return usage_error;
        }
        if (!out.empty())
            cfg.out = out;
        if (seed)
            cfg.seed = *seed;
        if (jobs)
            cfg.jobs = *jobs;
        if (max_m)
            cfg.max_m = *max_m;
        if (!suites.empty())
            cfg.suites = suites;
        if (count)
            cfg.count = *count;
        if (suite_N)
            cfg.suite_N = *suite_N;
        if (theorem)
            cfg.theorem = theorem;
        if (quantity)
            cfg.quantity = quantity;
        if (m)
            cfg.m = m;
        if (nu)
            cfg.nu = nu;
        if (!experiments.empty())
            cfg.experiments = experiments;
        if (tol)
            cfg.rate_tol = *tol;
        if (!Ns.empty())
            cfg.Ns = Ns;
        if (alpha)
            cfg.problem.alpha = *alpha;
        if (T)
            cfg.problem.T = *T;
        if (u0)
            cfg.problem.u0 = *u0;
        if (N)
            cfg.scheme.N = *N;
        if (n_x)
            cfg.scheme.n_x = *n_x;
        if (gamma)
            cfg.scheme.gamma = *gamma;
        if (method)
            cfg.scheme.method = *method;
        if (cfg.command == "inequalities" && cfg.suites.empty()) {
            std::cerr << "inequalities: select at least one suite\n" << c_in->help();
            return usage_error;
        }
        std::vector<CheckSummary> summary;
        const ExitCode code = run(cfg, summary);
        for (const auto& c : summary)
            std::cout << c.name << ": " << c.total - c.failed << "/" << c.total << " checks pass\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return usage_error;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return io_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return usage_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return check_failed;
    }
}

} // namespace fracreg::cli
