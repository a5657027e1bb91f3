#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"
#include "fracreg/mesh.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fracreg;

namespace {

double max_abs_diff(const Series& s, double (*f)(double), std::size_t from = 1)
{
    double e = 0;
    for (std::size_t n = from; n < s.size(); ++n)
        e = std::max(e, std::fabs(s.scalar_at(n) - f(s.mesh()[n])));
    return e;
}

} // namespace

TEST_CASE("omega kernel values")
{
    CHECK(omega(1.0, 3.7) == doctest::Approx(1.0));
    CHECK(omega(0.5, 1.0) == doctest::Approx(0.564190).epsilon(1e-6));
    CHECK(omega(-2.0, 5.0) == 0.0);
    CHECK(omega(0.0, 2.0) == 0.0);
    CHECK(omega(2.0, 3.0) == doctest::Approx(3.0));
    CHECK_THROWS_AS(omega(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("graded mesh nodes")
{
    const auto u = make_graded_mesh(1, 4, 1);
    CHECK(u.nodes() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    const auto q = make_graded_mesh(1, 4, 2);
    CHECK(q[1] == doctest::Approx(1.0 / 16));
    CHECK(q[2] == doctest::Approx(0.25));
    CHECK(q[3] == doctest::Approx(9.0 / 16));
    CHECK(q[4] == 1.0);
    const auto c = make_graded_mesh(2, 2, 3);
    CHECK(c.size() == 3);
    CHECK(c[1] == doctest::Approx(0.25));
    CHECK(c[2] == 2.0);
    CHECK_THROWS_AS(make_graded_mesh(1, 4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(make_graded_mesh(0, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(GradedMesh(std::vector<double>{0, 0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("graded mesh is increasing and ends at T")
{
    for (double gamma : {1.0, 1.5, 3.0, 8.0})
        for (std::size_t N : {1u, 7u, 64u}) {
            const auto m = make_graded_mesh(2.5, N, gamma);
            CHECK(m[0] == 0.0);
            CHECK(m.T() == 2.5);
            for (std::size_t n = 1; n < m.size(); ++n)
                CHECK(m.step(n) > 0);
        }
}

TEST_CASE("frac_integral of one and of t")
{
    const auto mesh = make_graded_mesh(1, 32, 2);
    const auto one = Series::sample(mesh, [](double) { return 1.0; });
    const auto I = frac_integral(0.5, one);
    CHECK(I.scalar_at(mesh.N()) == doctest::Approx(1.128379).epsilon(1e-6));
    CHECK(I.scalar_at(0) == 0.0);

    const auto t = Series::sample(mesh, [](double s) { return s; });
    CHECK(max_abs_diff(frac_integral(1.0, t), [](double s) { return s * s / 2; }) < 1e-14);
}

TEST_CASE("frac_integral is exact on affine data")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-2, 2), Mu(0.05, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double c0 = U(rng), c1 = U(rng), mu = Mu(rng);
        const auto mesh = make_graded_mesh(1.5, 40, 1 + trial % 4);
        const auto s = Series::sample(mesh, [&](double x) { return c0 + c1 * x; });
        const auto I = frac_integral(mu, s);
        for (std::size_t n = 1; n < mesh.size(); ++n) {
            const double x = mesh[n];
            const double exact = c0 * std::pow(x, mu) / std::tgamma(mu + 1) + c1 * std::pow(x, mu + 1) / std::tgamma(mu + 2);
            CHECK(I.scalar_at(n) == doctest::Approx(exact).epsilon(1e-12));
        }
    }
}

TEST_CASE("monomial rule for t^2 improves with N")
{
    const double mu = 0.5;
    double prev = 1;
    for (std::size_t N : {16u, 32u, 64u}) {
        const auto mesh = make_graded_mesh(1, N, 1);
        const auto s = Series::sample(mesh, [](double x) { return x * x; });
        const auto I = frac_integral(mu, s);
        double e = 0;
        for (std::size_t n = 1; n < mesh.size(); ++n)
            e = std::max(e, std::fabs(I.scalar_at(n) - 2 / std::tgamma(3 + mu) * std::pow(mesh[n], 2 + mu)));
        CHECK(e < prev);
        prev = e;
    }
    CHECK(prev < 1e-4);
}

TEST_CASE("semigroup property converges at first order on graded meshes")
{
    for (double mu : {0.25, 0.5, 1.0})
        for (double nu : {0.3, 0.75}) {
            std::vector<double> errs;
            for (std::size_t N : {32u, 64u, 128u}) {
                const auto mesh = make_graded_mesh(1, N, 2);
                const auto s = Series::sample(mesh, [](double x) { return std::cos(3 * x); });
                const auto lhs = frac_integral(mu, frac_integral(nu, s));
                const auto rhs = frac_integral(mu + nu, s);
                errs.push_back((lhs.values() - rhs.values()).cwiseAbs().maxCoeff());
            }
            CHECK(errs[1] <= 0.6 * errs[0] + 1e-14);
            CHECK(errs[2] <= 0.6 * errs[1] + 1e-14);
        }
}

TEST_CASE("rl_derivative of one and t")
{
    const auto mesh = make_graded_mesh(1, 64, 2);
    const auto one = Series::sample(mesh, [](double) { return 1.0; });
    const auto d1 = rl_derivative(0.5, one);
    CHECK_THROWS_AS(d1.scalar_at(0), SingularAtOrigin);
    for (std::size_t n = mesh.N() / 4; n < mesh.size(); ++n)
        CHECK(d1.scalar_at(n) == doctest::Approx(omega(0.5, mesh[n])).epsilon(5e-3));
    const auto fine = make_graded_mesh(1, 256, 2);
    const auto d1f = rl_derivative(0.5, Series::sample(fine, [](double) { return 1.0; }));
    CHECK(std::fabs(d1f.scalar_at(64) / omega(0.5, fine[64]) - 1) <
          0.5 * std::fabs(d1.scalar_at(16) / omega(0.5, mesh[16]) - 1));

    const auto t = Series::sample(mesh, [](double x) { return x; });
    const auto dt = rl_derivative(0.5, t);
    for (std::size_t n = mesh.N() / 4; n < mesh.size(); ++n)
        CHECK(dt.scalar_at(n) == doctest::Approx(std::sqrt(mesh[n]) / std::tgamma(1.5)).epsilon(1e-3));
    CHECK_THROWS_AS(rl_derivative(1.0, t), std::invalid_argument);
}

TEST_CASE("differentiate polynomials on a graded mesh")
{
    const auto mesh = make_graded_mesh(1, 64, 2);
    const auto sq = Series::sample(mesh, [](double x) { return x * x; });
    const auto cube = Series::sample(mesh, [](double x) { return x * x * x; });
    const auto d1 = differentiate(sq, 1), d2 = differentiate(cube, 2);
    for (std::size_t n = 1; n < mesh.size(); ++n) {
        CHECK(d1.scalar_at(n) == doctest::Approx(2 * mesh[n]).epsilon(1e-10).scale(1));
        CHECK(d2.scalar_at(n) == doctest::Approx(6 * mesh[n]).epsilon(1e-8).scale(1));
    }
    // First derivative of a cubic: second-order accurate.
    double prev = 1;
    for (std::size_t N : {32u, 64u, 128u}) {
        const auto m = make_graded_mesh(1, N, 1);
        const auto d = differentiate(Series::sample(m, [](double x) { return x * x * x; }), 1);
        double e = 0;
        for (std::size_t n = 1; n < m.size(); ++n)
            e = std::max(e, std::fabs(d.scalar_at(n) - 3 * m[n] * m[n]));
        CHECK(e < 0.3 * prev);
        prev = e;
    }
    const auto w = fd_weights(0.0, std::vector<double>{-1, 0, 1}, 2);
    CHECK(w[0] == doctest::Approx(1));
    CHECK(w[1] == doctest::Approx(-2));
    CHECK(w[2] == doctest::Approx(1));
}

TEST_CASE("shift identity assembled from pieces")
{
    const auto mesh = make_graded_mesh(1, 64, 2);
    const double c = 1.7, mu = 0.4;
    const auto constant = Series::sample(mesh, [&](double) { return c; });
    const std::vector<double> init{c};
    const auto r = fi_omega_shift(1, mu, constant, init);
    for (std::size_t n = 1; n < mesh.size(); ++n)
        CHECK(r.scalar_at(n) == doctest::Approx(c * omega(mu, mesh[n])).epsilon(1e-12));

    // d^2 I^0.5 t = omega_0.5 on both sides.
    const auto t = Series::sample(mesh, [](double x) { return x; });
    const std::vector<double> init2{0.0, 1.0};
    const auto r2 = fi_omega_shift(2, 0.5, t, init2);
    for (std::size_t n = 1; n < mesh.size(); ++n)
        CHECK(std::fabs(r2.scalar_at(n) - omega(0.5, mesh[n])) <= 1e-10 * omega(0.5, mesh[n]));

    CHECK_THROWS_AS(fi_omega_shift(2, 0.5, t, init), std::invalid_argument);
}

TEST_CASE("Mittag-Leffler reference values")
{
    CHECK(mittag_leffler(1.0, 1.0, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-13));
    CHECK(mittag_leffler(0.5, 1.0, -1.0) == doctest::Approx(0.427584).epsilon(1e-6));
    for (double a : {0.25, 0.5, 0.9})
        CHECK(mittag_leffler(a, a, 0.0) == doctest::Approx(1 / std::tgamma(a)).epsilon(1e-14));
    CHECK(mittag_leffler(1.0, 2.0, -3.0) == doctest::Approx((1 - std::exp(-3.0)) / 3).epsilon(1e-13));
}

TEST_CASE("E_1/2 agrees with the complementary error function form")
{
    // E_{1/2}(-x) = exp(x^2) erfc(x)
    for (double x : {0.01, 0.3, 1.0, 2.5, 4.0, 4.9, 5.1, 6.0, 10.0, 30.0}) {
        const double ref = x < 20 ? std::exp(x * x) * std::erfc(x) : 1 / (x * std::sqrt(M_PI)) * (1 - 1 / (2 * x * x));
        CHECK(mittag_leffler(0.5, -x) == doctest::Approx(ref).epsilon(x < 20 ? 1e-10 : 1e-4));
    }
}

TEST_CASE("Mittag-Leffler evaluation routes agree in the switching band")
{
    for (double beta : {0.3, 0.5, 0.8}) {
        const MittagLeffler E(beta);
        for (double x : {4.2, 5.0, 5.8}) {
            const double a = E.by_integral(-x);
            CHECK(E(-x) == doctest::Approx(a).epsilon(1e-8));
        }
    }
}
