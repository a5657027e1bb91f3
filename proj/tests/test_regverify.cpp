#include "fracreg/errors.hpp"
#include "fracreg/regverify.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fracreg;
using namespace fracreg::reg;

namespace {

std::vector<std::pair<double, double>> sampled(double (*f)(double), int count = 40)
{
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < count; ++i) {
        const double t = std::pow(10.0, -4 + 3.0 * i / (count - 1));
        s.emplace_back(t, f(t));
    }
    return s;
}

solver::ProblemSpec sine(double T = 1e-4)
{
    solver::ProblemSpec p;
    p.alpha = 0.5;
    p.T = T;
    p.u0 = [](double x) { return std::sin(M_PI * x); };
    p.u0_regularity_mu = 2;
    return p;
}

} // namespace

TEST_CASE("exponent fit on exact power laws")
{
    const auto e = estimate_exponent(sampled([](double t) { return 3 / std::sqrt(t); }), 1e-4, 1e-1);
    CHECK(e.exponent == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(e.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(e.stderr_ < 1e-10);
    CHECK(e.samples == 40);

    const auto c = estimate_exponent(sampled([](double) { return 2.0; }), 1e-4, 1e-1);
    CHECK(std::fabs(c.exponent) < 1e-12);
}

TEST_CASE("exponent fit with multiplicative noise")
{
    std::mt19937_64 rng(17);
    std::normal_distribution<double> Z;
    std::vector<std::pair<double, double>> s;
    for (int i = 0; i < 60; ++i) {
        const double t = std::pow(10.0, -3 + 2.0 * i / 59);
        s.emplace_back(t, std::pow(t, 0.3) * (1 + 0.01 * Z(rng)));
    }
    const auto e = estimate_exponent(s, 1e-3, 1e-1);
    CHECK(e.exponent == doctest::Approx(0.3).epsilon(0.02 / 0.3));
}

TEST_CASE("exponent fit rejects degenerate input")
{
    CHECK_THROWS(estimate_exponent(sampled([](double t) { return t; }, 5), 1e-4, 1e-1));
    auto s = sampled([](double t) { return t; });
    s[10].second = 0;
    CHECK_THROWS(estimate_exponent(s, 1e-4, 1e-1));
}

TEST_CASE("predicted exponents")
{
    const double a = 0.5;
    CHECK(predicted_exponent({"cor3.4", "dt", 1}, a, 2) == doctest::Approx(-1));
    CHECK(predicted_exponent({"cor3.4", "frac", 1}, a, 2) == doctest::Approx(-0.5));
    CHECK(predicted_exponent({"cor3.4", "grad-dt", 1}, a, 2) == doctest::Approx(-1.25));
    CHECK(predicted_exponent({"thm4.2", "dt", 1}, a, 2) == doctest::Approx(-0.5));
    CHECK(predicted_exponent({"thm4.2", "dt", 1}, a, 0.5) == doctest::Approx(-0.875));
    CHECK(predicted_exponent({"thm4.2", "inc", 0}, a, 2) == doctest::Approx(0.5));
    CHECK(predicted_exponent({"thm4.2", "frac-inc", 1}, a, 2) == doctest::Approx(0.0));
    CHECK(predicted_exponent({"thm4.2", "grad-dt", 1}, a, 2) == doctest::Approx(-0.75));
    CHECK(predicted_exponent({"thm4.1", "dt-norm", 0, 2}, a, 0.5) == doctest::Approx(-0.375));
    CHECK(predicted_exponent({"thm4.3", "dt-norm", 0, 2}, a, 0.5) == doctest::Approx(-0.375));
    CHECK_THROWS_AS(predicted_exponent({"thm4.2", "frac", 1}, a, 2), HypothesisViolation);
    CHECK_THROWS_AS(predicted_exponent({"thm9.9", "dt", 1}, a, 2), HypothesisViolation);
}

TEST_CASE("rate verification on the modal solution")
{
    solver::SchemeConfig s;
    s.N = 256;
    s.gamma = 3;
    s.n_x = 64;
    const auto r = verify_rate({"thm4.2", "dt", 1}, sine(), s);
    CHECK(r.method == "spectral");
    CHECK(r.tol == doctest::Approx(0.05));
    CHECK(r.mesh_independent);
    CHECK(r.pass);
    CHECK(r.estimate.exponent == doctest::Approx(-0.5).epsilon(0.1));
    CHECK(r.estimate.t_lo == doctest::Approx(1e-7));
    CHECK(r.estimate.t_hi == doctest::Approx(1e-5));

    const auto c = verify_u_continuity(sine(), s);
    CHECK(c.pass);
    CHECK(c.predicted == doctest::Approx(0.5));

    solver::ProblemSpec zero = sine();
    zero.u0 = [](double) { return 0.0; };
    CHECK(verify_rate({"thm4.2", "dt", 1}, zero, s).pass);
}

TEST_CASE("growth test on ratio sequences")
{
    CHECK(no_growth({1.0, 1.1, 1.2}, 1.25));
    CHECK(!no_growth({1.0, 1.1, 1.3}, 1.25));
    CHECK(no_growth({2.0, 1.0, 0.5}, 1.25));
}

TEST_CASE("stability ratios are flat under refinement")
{
    auto p = sine(1e-2);
    p.coeffs.F = [](double x, double t) { return std::sin(M_PI * x) * (1 + t); };
    p.coeffs.dF = [](double x, double) { return std::sin(M_PI * x); };
    p.coeffs.a = [](double, double) { return 1.0; };
    std::vector<double> first, second;
    for (std::size_t N : {32u, 64u}) {
        solver::SchemeConfig s;
        s.N = N;
        s.gamma = 3;
        s.n_x = 16;
        const auto r = stability_ratios(p, s, 1);
        CHECK(r.first > 0);
        CHECK(r.second > 0);
        first.push_back(r.first);
        second.push_back(r.second);
    }
    CHECK(no_growth(first, 1.25));
    CHECK(no_growth(second, 1.25));
}

TEST_CASE("initial memory terms vanish")
{
    auto p = sine(1e-2);
    p.coeffs.F = [](double x, double t) { return std::sin(M_PI * x) * (1 + t); };
    p.coeffs.dF = [](double x, double) { return std::sin(M_PI * x); };
    solver::SchemeConfig s;
    s.N = 16;
    s.n_x = 16;
    CHECK(initial_memory_terms(p, solver::solve_weak(p, s)) == 0.0);
}

TEST_CASE("weak solver convergence against the modal solution")
{
    solver::SchemeConfig s;
    s.gamma = 3;
    s.n_x = 32;
    const auto r = convergence(sine(1), s, {32, 64, 128});
    CHECK(r.error.size() == 3);
    CHECK(r.error[2] < r.error[1]);
    CHECK(r.error[1] < r.error[0]);
    CHECK(r.order >= 1.0);
}

TEST_CASE("boundedness sweep settles")
{
    solver::SchemeConfig s;
    s.gamma = 3;
    s.n_x = 16;
    const auto b = boundedness(sine(1e-2), s, {32, 64, 128}, 1e-2);
    CHECK(b.N.size() == 3);
    for (double v : b.sup_value)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.non_increasing);
    CHECK(b.bounded);
}
