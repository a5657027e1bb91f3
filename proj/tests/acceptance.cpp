// One line per acceptance criterion; exit status is the number of failing criteria.

#include "fracreg/fractops.hpp"
#include "fracreg/identities.hpp"
#include "fracreg/quadfunc.hpp"
#include "fracreg/regverify.hpp"
#include "fracreg/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace fracreg;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Outcome()> run;
};

solver::ProblemSpec sine_problem(double T)
{
    solver::ProblemSpec p;
    p.alpha = 0.5;
    p.T = T;
    p.u0 = [](double x) { return std::sin(M_PI * x); };
    p.u0_regularity_mu = 2;
    return p;
}

solver::ProblemSpec rough_problem(double T)
{
    solver::ProblemSpec p;
    p.alpha = 0.5;
    p.T = T;
    p.u0 = [](double) { return 1.0; };
    p.u0_regularity_mu = 0.5;
    return p;
}

solver::ProblemSpec perturbed_problem(double T)
{
    auto p = sine_problem(T);
    p.coeffs.F = [](double x, double t) { return std::sin(M_PI * x) * (1 + t); };
    p.coeffs.dF = [](double x, double) { return std::sin(M_PI * x); };
    p.coeffs.a = [](double, double) { return 1.0; };
    return p;
}

// Rate experiments live on [0, 1e-4] so that the fit window sits inside the initial layer.
constexpr double rate_T = 1e-4;

solver::SchemeConfig rate_scheme(std::size_t n_x)
{
    solver::SchemeConfig s;
    s.N = 256;
    s.gamma = 3;
    s.n_x = n_x;
    return s;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string rate_line(const std::string& label, const reg::RateReport& r)
{
    return label + " " + fmt(r.estimate.exponent) + " (expected " + fmt(r.predicted) + " +- " + fmt(r.tol) +
           ", refined " + fmt(r.refined_exponent) + ")";
}

Outcome identity_suite()
{
    const auto rows = identities::run_suite(6, 1e-12);
    int failed = 0;
    double worst = 0;
    for (const auto& r : rows) {
        failed += !r.pass;
        worst = std::max(worst, r.residual);
    }
    return {failed == 0 && !rows.empty(),
            std::to_string(rows.size()) + " checks, " + std::to_string(failed) + " failed, max residual " + fmt(worst)};
}

Outcome positivity()
{
    const auto reps = quad::positivity_suite(2024, 200, {0, 0.25, 0.5, 0.75, 1}, 256);
    int bad = 0;
    double worst = 1;
    for (const auto& r : reps) {
        bad += r.violated();
        worst = std::min(worst, r.margin / (r.tol / 1e-10));
    }
    return {bad == 0 && reps.size() == 1000,
            std::to_string(reps.size()) + " evaluations, " + std::to_string(bad) +
                " negative, min Q1/Q0 " + fmt(worst)};
}

Outcome lemma_suites()
{
    quad::LemmaSuiteConfig cfg;
    cfg.seed = 7;
    cfg.count = 100;
    cfg.N = 256;
    std::ostringstream os;
    int bad = 0;
    for (const char* lemma : {"2.2", "2.3", "2.4"}) {
        const auto reps = quad::lemma_suite(lemma, cfg);
        int v = 0;
        for (const auto& r : reps)
            v += r.violated();
        bad += v;
        os << lemma << ": " << reps.size() << " checks " << v << " violations; ";
    }
    return {bad == 0, os.str()};
}

Outcome gronwall()
{
    const auto mesh = make_graded_mesh(1, 256, 2);
    const auto q = Series::sample(mesh, [](double t) { return mittag_leffler(0.5, std::sqrt(t)); });
    const auto one = [](double) { return 1.0; };
    const auto eq = quad::gronwall_bound(one, one, 0.5, q);
    const double gap = (eq.bound.values() - q.values()).cwiseAbs().maxCoeff();
    const auto suite = quad::gronwall_suite(11, 50, 256);
    int premises = 0, violated = 0;
    for (const auto& r : suite) {
        premises += r.premise_holds;
        violated += r.violated;
    }
    return {gap <= 1e-6 && premises == 50 && violated == 0,
            "equality gap " + fmt(gap) + ", " + std::to_string(premises) + "/50 premises, " +
                std::to_string(violated) + " violations"};
}

Outcome solver_vs_oracle()
{
    solver::SchemeConfig s;
    s.gamma = 3;
    s.n_x = 256;
    const auto r = reg::convergence(sine_problem(1), s, {128, 256, 512, 1024});
    std::ostringstream os;
    for (std::size_t i = 0; i < r.N.size(); ++i)
        os << "N=" << r.N[i] << " err " << fmt(r.error[i]) << "; ";
    os << "order " << fmt(r.order);
    return {r.error.back() <= 1e-3 && r.order >= 1.0, os.str()};
}

Outcome smooth_rates()
{
    const auto p = sine_problem(rate_T);
    const auto s = rate_scheme(128);
    const auto dt = reg::verify_rate({"thm4.2", "dt", 1}, p, s, 0.05);
    const auto frac = reg::verify_rate({"cor3.4", "frac", 1}, p, s, 0.05);
    const auto inc = reg::verify_rate({"thm4.2", "inc", 0}, p, s, 0.05);
    const auto finc = reg::verify_rate({"thm4.2", "frac-inc", 1}, p, s, 0.05);
    return {dt.pass && frac.pass && inc.pass && finc.pass,
            rate_line("dt", dt) + "; " + rate_line("frac", frac) + "; " + rate_line("inc", inc) + "; " +
                rate_line("frac-inc", finc)};
}

Outcome rough_rates()
{
    const auto p = rough_problem(rate_T);
    const auto s = rate_scheme(128);
    const auto n2 = reg::verify_rate({"thm4.1", "dt-norm", 0, 2, true}, p, s, 0.1);
    const auto dt = reg::verify_rate({"thm4.2", "dt", 1, 0, true}, p, s, 0.1);
    return {n2.pass && dt.pass && std::fabs(n2.predicted + 0.375) < 1e-12 && std::fabs(dt.predicted + 0.875) < 1e-12,
            rate_line("norm2", n2) + "; " + rate_line("dt", dt)};
}

Outcome perturbed()
{
    const auto p = perturbed_problem(rate_T);
    const auto rate = reg::verify_rate({"thm4.2", "dt", 1}, p, rate_scheme(64), 0.1);
    std::ostringstream os;
    os << rate_line("dt", rate) << (rate.method == "weak" ? "" : " [not weak]");
    bool flat = true;
    for (int m : {1, 2}) {
        std::vector<double> first, second;
        for (std::size_t N : {64u, 128u, 256u}) {
            solver::SchemeConfig s;
            s.N = N;
            s.gamma = 3;
            s.n_x = 32;
            const auto r = reg::stability_ratios(p, s, m);
            first.push_back(r.first);
            second.push_back(r.second);
        }
        const bool ok = reg::no_growth(first, 1.25) && reg::no_growth(second, 1.25);
        flat = flat && ok;
        os << "; m=" << m << " ratios " << fmt(first[0]) << "/" << fmt(first[1]) << "/" << fmt(first[2]) << " and "
           << fmt(second[0]) << "/" << fmt(second[1]) << "/" << fmt(second[2]);
    }
    return {rate.pass && rate.method == "weak" && flat, os.str()};
}

Outcome boundedness()
{
    auto p = perturbed_problem(1);
    const double eta = 0.5;
    p.source = solver::Source::separable_source([](double x) { return std::sin(M_PI * x); },
                                                [eta](double t) { return std::pow(t, eta - 1); },
                                                [eta](double t) { return std::pow(t, eta) / eta; });
    p.source_eta = eta;
    // |d^j/dt^j t^(eta-1)| t^(j+1-eta) <= max(1, |eta-1|, |(eta-1)(eta-2)|) = 1, times |sin| = 1/sqrt 2.
    p.source_M = 1 / std::sqrt(2.0);
    solver::SchemeConfig s;
    s.gamma = 3;
    s.n_x = 64;
    const auto r = reg::boundedness(p, s, {128, 256, 512}, 0.0);
    std::ostringstream os;
    os.precision(10);
    os << "value sup";
    for (double v : r.sup_value)
        os << " " << v;
    os << "; gradient sup";
    for (double v : r.sup_gradient)
        os << " " << v;
    os << "; settling " << (r.bounded ? "yes" : "no") << ", non-increasing " << (r.non_increasing ? "yes" : "no");
    return {r.bounded && r.non_increasing, os.str()};
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria = {
        {1, "identity tables, residual <= 1e-12", 5, identity_suite},
        {2, "positivity of Q1, 200 series x 5 orders", 10, positivity},
        {3, "randomized inequality suites", 30, lemma_suites},
        {4, "Gronwall equality and Picard premises", 10, gronwall},
        {5, "weak solver vs modal solution", 120, solver_vs_oracle},
        {6, "smooth-data rates, tol 0.05", 60, smooth_rates},
        {7, "rough-data rates, tol 0.1", 60, rough_rates},
        {8, "perturbed coefficients, rate and ratio growth", 300, perturbed},
        {9, "bounded and non-increasing weighted suprema", 120, boundedness},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.ok && in_time;
        failures += !pass;
        std::printf("[%s] criterion %d: %s | %s | %.1f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
