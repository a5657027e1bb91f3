#include "fracreg/femcore.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracreg::fem;

TEST_CASE("mass matrix integrates one")
{
    const SpaceMesh mesh(16);
    const SparseMatrix M = mass_matrix(mesh);
    // The interior hats sum to one except on the two boundary cells, where they ramp to zero.
    const double h = mesh.h();
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(mesh.dofs()));
    CHECK(ones.dot(M * ones) == doctest::Approx(1 - 4 * h / 3).epsilon(1e-12));
    CHECK(load_vector(mesh, [](double) { return 1.0; }).sum() == doctest::Approx(1 - h).epsilon(1e-12));
    // Adding the boundary hats back gives the full mass of the constant one.
    CHECK(ones.dot(M * ones) + 2 * (h / 3) + 4 * (h / 6) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stiffness stencil for unit diffusion")
{
    const SpaceMesh mesh(8);
    const Eigen::MatrixXd K(stiffness_matrix(mesh, [](double) { return 1.0; }));
    const double h = mesh.h();
    CHECK(K(3, 3) == doctest::Approx(2 / h));
    CHECK(K(3, 2) == doctest::Approx(-1 / h));
    CHECK(K(3, 4) == doctest::Approx(-1 / h));
    CHECK(K(3, 5) == 0.0);
    CHECK((K - K.transpose()).norm() == 0.0);
    CHECK_THROWS_AS(stiffness_matrix(mesh, [](double x) { return 0.5 + x; }), std::invalid_argument);
}

TEST_CASE("discrete eigenpairs")
{
    const SpaceMesh mesh(128);
    const SparseMatrix M = mass_matrix(mesh), K = stiffness_matrix(mesh, [](double) { return 1.0; });
    const auto spec = SpectralDecomposition::compute(K, M);
    CHECK(spec.lambda(0) == doctest::Approx(M_PI * M_PI).epsilon(5e-3));
    CHECK(spec.lambda(1) == doctest::Approx(4 * M_PI * M_PI).epsilon(5e-3));
    const Eigen::MatrixXd G = spec.phi.transpose() * (M * spec.phi);
    CHECK((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-10);
    for (Eigen::Index k = 1; k < spec.lambda.size(); ++k)
        CHECK(spec.lambda(k) >= spec.lambda(k - 1));

    // |phi_k|_mu = lambda_k^(mu/2)
    for (double mu : {0.0, 0.5, 1.0, 2.0})
        CHECK(hmu_norm(mu, spec.phi.col(3), spec) == doctest::Approx(std::pow(spec.lambda(3), mu / 2)).epsilon(1e-10));
}

TEST_CASE("spectral norms of a sine")
{
    const SpaceMesh mesh(256);
    const SparseMatrix M = mass_matrix(mesh), K = stiffness_matrix(mesh, [](double) { return 1.0; });
    const auto spec = SpectralDecomposition::compute(K, M);
    const Eigen::VectorXd v = project(mesh, [](double x) { return std::sin(M_PI * x); });
    CHECK(hmu_norm(2, v, spec) == doctest::Approx(6.9791).epsilon(1e-2 / 6.9791));
    CHECK(hmu_norm(0, v, spec) == doctest::Approx(l2_norm(v, M)).epsilon(1e-10));
    CHECK(hmu_norm(1, v, spec) == doctest::Approx(energy_norm(v, K)).epsilon(1e-10));
    CHECK(l2_norm(v, M) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
}

TEST_CASE("advection and reaction matrices")
{
    const SpaceMesh mesh(32);
    const SparseMatrix R = reaction_matrix(mesh, [](double) { return 1.0; });
    CHECK((Eigen::MatrixXd(R) - Eigen::MatrixXd(mass_matrix(mesh))).cwiseAbs().maxCoeff() < 1e-14);
    // For constant psi the advection matrix is skew: int phi_j phi_i' = -int phi_j' phi_i.
    const Eigen::MatrixXd A(advection_matrix(mesh, [](double) { return 2.0; }));
    CHECK((A + A.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(A(4, 5) == doctest::Approx(-1.0));
    // u = x(1 - x) interpolated exactly at nodes; int psi u phi_i' with psi = 1 equals
    // -int u' phi_i.
    Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.dofs()));
    for (std::size_t i = 0; i < mesh.dofs(); ++i)
        u(static_cast<Eigen::Index>(i)) = mesh.dof_x(i) * (1 - mesh.dof_x(i));
    const Eigen::VectorXd Au = Eigen::MatrixXd(advection_matrix(mesh, [](double) { return 1.0; })) * u;
    const Eigen::VectorXd ref = -load_vector(mesh, [](double x) { return 1 - 2 * x; });
    CHECK((Au - ref).cwiseAbs().maxCoeff() < 1e-3 * mesh.h());
}

TEST_CASE("assemble leaves absent coefficients empty")
{
    CoefficientField c;
    const SpaceMesh mesh(8);
    auto sys = assemble(c, mesh, 0.3);
    CHECK(sys.A_F.nonZeros() == 0);
    CHECK(sys.R_a.nonZeros() == 0);
    CHECK(c.constant_diffusion_only());
    c.a = [](double, double) { return 1.0; };
    sys = assemble(c, mesh, 0.3);
    CHECK(sys.R_a.nonZeros() > 0);
    CHECK(!c.constant_diffusion_only());
}
