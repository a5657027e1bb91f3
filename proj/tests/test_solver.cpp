#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"
#include "fracreg/solver.hpp"

#include <doctest.h>

#include <Eigen/SparseLU>

#include <cmath>

using namespace fracreg;
using namespace fracreg::solver;

namespace {

ProblemSpec sine_problem(double alpha, double T)
{
    ProblemSpec p;
    p.alpha = alpha;
    p.T = T;
    p.u0 = [](double x) { return std::sin(M_PI * x); };
    p.u0_regularity_mu = 2;
    return p;
}

double max_l2_gap(const Trajectory& a, const Trajectory& b, const fem::SparseMatrix& M)
{
    double e = 0;
    for (std::size_t n = 0; n < a.mesh.size(); ++n)
        e = std::max(e, fem::l2_norm(a.at(n) - b.at(n), M));
    return e;
}

} // namespace

TEST_CASE("problem validation")
{
    auto p = sine_problem(0.5, 1);
    CHECK_NOTHROW(p.validate());
    p.alpha = 1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.alpha = 0.5;
    p.T = -1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.T = 1;
    p.u0_regularity_mu = 3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("zero data gives the zero solution")
{
    ProblemSpec p;
    p.alpha = 0.4;
    p.coeffs.F = [](double x, double t) { return std::sin(M_PI * x) * (1 + t); };
    p.coeffs.dF = [](double x, double) { return std::sin(M_PI * x); };
    p.coeffs.a = [](double, double) { return 1.0; };
    SchemeConfig s;
    s.N = 32;
    s.n_x = 16;
    const auto tr = solve_weak(p, s);
    CHECK(tr.states.values().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("modal solution decays like the Mittag-Leffler function")
{
    const auto p = sine_problem(0.5, 1);
    const SpectralSolution S(p, 128);
    const double lambda = S.spectral().lambda(0);
    CHECK(lambda == doctest::Approx(M_PI * M_PI).epsilon(1e-4));
    const double t = 0.01;
    const double ratio = fem::l2_norm(S.state(t), S.spectral().M) / fem::l2_norm(S.initial(), S.spectral().M);
    CHECK(ratio == doctest::Approx(0.4312).epsilon(1e-3 / 0.4312));
    CHECK(ratio == doctest::Approx(mittag_leffler(0.5, -lambda * std::sqrt(t))).epsilon(1e-8));
    CHECK((S.state(1e-300) - S.initial()).norm() < 1e-6);
}

TEST_CASE("modal solution rejects variable coefficients")
{
    auto p = sine_problem(0.5, 1);
    p.coeffs.a = [](double, double) { return 1.0; };
    CHECK_THROWS_AS(SpectralSolution(p, 16), HypothesisViolation);
}

TEST_CASE("weak solver matches the modal solution")
{
    const auto p = sine_problem(0.5, 1);
    std::vector<double> err;
    for (std::size_t N : {64u, 128u}) {
        SchemeConfig s;
        s.N = N;
        s.gamma = 3;
        s.n_x = 32;
        const auto w = solve_weak(p, s);
        const auto m = solve_spectral_const(p, s);
        CHECK(w.mesh == m.mesh);
        err.push_back(max_l2_gap(w, m, fem::mass_matrix(w.space)));
    }
    CHECK(err[0] < 1e-2);
    CHECK(err[1] < 0.6 * err[0]);
}

TEST_CASE("near alpha = 1 the scheme agrees with backward Euler")
{
    const auto p = sine_problem(0.999, 0.1);
    SchemeConfig s;
    s.N = 200;
    s.n_x = 32;
    const auto w = solve_weak(p, s);

    const fem::SpaceMesh space(s.n_x);
    const auto M = fem::mass_matrix(space);
    const auto K = fem::stiffness_matrix(space, p.coeffs.kappa);
    const double dt = p.T / static_cast<double>(s.N);
    Eigen::SparseLU<fem::SparseMatrix> lu;
    const fem::SparseMatrix A = M + dt * K;
    lu.compute(A);
    Eigen::VectorXd u = w.at(0);
    double e = 0;
    for (std::size_t n = 1; n <= s.N; ++n) {
        u = lu.solve(M * u);
        e = std::max(e, fem::l2_norm(u - w.at(n), M));
    }
    CHECK(e < 1e-2);
}

TEST_CASE("weak solver is linear in the data")
{
    auto p = sine_problem(0.6, 0.5);
    p.coeffs.F = [](double x, double t) { return std::sin(M_PI * x) * (1 + t); };
    p.coeffs.dF = [](double x, double) { return std::sin(M_PI * x); };
    p.coeffs.a = [](double, double) { return 1.0; };
    SchemeConfig s;
    s.N = 48;
    s.gamma = 2;
    s.n_x = 24;
    auto p1 = p, p2 = p, p12 = p;
    p1.u0 = [](double x) { return std::sin(M_PI * x); };
    p2.u0 = [](double x) { return x * (1 - x); };
    p12.u0 = [](double x) { return 2 * std::sin(M_PI * x) - 3 * x * (1 - x); };
    const auto a = solve_weak(p1, s), b = solve_weak(p2, s), c = solve_weak(p12, s);
    const Eigen::MatrixXd combo = 2 * a.states.values() - 3 * b.states.values();
    CHECK((combo - c.states.values()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("separable source enters through its exact antiderivative")
{
    ProblemSpec p;
    p.alpha = 0.5;
    p.T = 1;
    const double eta = 0.5;
    p.source = Source::separable_source([](double x) { return std::sin(M_PI * x); },
                                        [eta](double t) { return std::pow(t, eta - 1); },
                                        [eta](double t) { return std::pow(t, eta) / eta; });
    const auto mesh = make_graded_mesh(1, 16, 2);
    const fem::SpaceMesh space(16);
    const auto f = f_rhs(p, mesh, space);
    const Eigen::VectorXd h = fem::project(space, [](double x) { return std::sin(M_PI * x); });
    for (std::size_t n = 0; n < mesh.size(); ++n)
        CHECK((f.at(n) - std::pow(mesh[n], eta) / eta * h).cwiseAbs().maxCoeff() < 1e-14);

    // A non-separable source that blows up at t = 0 cannot go through the trapezoidal rule.
    ProblemSpec q;
    q.source.g = [](double, double t) { return 1 / std::sqrt(t); };
    CHECK_THROWS(f_rhs(q, mesh, space));
}

TEST_CASE("time derivatives of the trajectory")
{
    const auto p = sine_problem(0.5, 1);
    SchemeConfig s;
    s.N = 512;
    s.gamma = 3;
    s.n_x = 32;
    const auto tr = solve_spectral_const(p, s);
    const SpectralSolution S(p, s.n_x);
    const auto d = time_derivative(tr, 1);
    const auto M = S.spectral().M;
    for (std::size_t n = 1; n < tr.mesh.size(); ++n) {
        const double t = tr.mesh[n];
        if (t < 0.01)
            continue;
        const Eigen::VectorXd exact = S.spectral().phi.leftCols(S.modes()) * S.derivative_modes(1, t);
        CHECK(fem::l2_norm(d.at(n) - exact, M) <= 1e-3 * std::max(1.0, fem::l2_norm(exact, M)));
    }
    SchemeConfig tiny = s;
    tiny.N = 12;
    CHECK_THROWS_AS(time_derivative(solve_spectral_const(p, tiny), 2), InsufficientSmoothness);
}

TEST_CASE("fractional derivative of a constant trajectory")
{
    const auto mesh = make_graded_mesh(1, 128, 2);
    const fem::SpaceMesh space(8);
    Eigen::MatrixXd v(space.dofs(), mesh.size());
    Eigen::VectorXd u0(space.dofs());
    for (std::size_t i = 0; i < space.dofs(); ++i)
        u0(static_cast<Eigen::Index>(i)) = std::sin(M_PI * space.dof_x(i));
    v.colwise() = u0;
    const Trajectory tr{mesh, space, Series(mesh, v), "constant", {}};
    const double alpha = 0.5;
    const auto d = frac_time_derivative(tr, 1, alpha);
    for (std::size_t n = mesh.N() / 4; n < mesh.size(); ++n)
        CHECK((d.at(n) - omega(alpha, mesh[n]) * u0).cwiseAbs().maxCoeff() <= 5e-3 * omega(alpha, mesh[n]));
}

TEST_CASE("mode truncation is reported")
{
    ProblemSpec p = sine_problem(0.5, 1);
    p.u0 = [](double x) { return x < 0.5 ? 1.0 : 0.0; };
    SchemeConfig s;
    s.N = 16;
    s.n_x = 32;
    const auto full = solve_spectral_const(p, s);
    CHECK(full.warnings.empty());
    const auto cut = solve_spectral_const(p, s, 3);
    CHECK(!cut.warnings.empty());
}
