#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <functional>

namespace fracreg::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using SpaceFn = std::function<double(double)>;
using SpaceTimeFn = std::function<double(double, double)>;

// Uniform cells on (0, 1); the n_x - 1 interior nodes carry the unknowns.
struct SpaceMesh {
    std::size_t n_x;

    explicit SpaceMesh(std::size_t cells);
    double h() const { return 1.0 / static_cast<double>(n_x); }
    std::size_t dofs() const { return n_x - 1; }
    // Coordinate of interior dof i (0-based), i.e. node i + 1.
    double dof_x(std::size_t i) const { return static_cast<double>(i + 1) * h(); }
};

// Scalar 1-D coefficients.  Empty functions mean identically zero.  Time derivatives of the
// advection and reaction coefficients are supplied analytically.
struct CoefficientField {
    SpaceFn kappa = [](double) { return 1.0; };
    SpaceTimeFn F, G, a, b;
    SpaceTimeFn dF, dG, da, db;

    bool constant_diffusion_only() const { return !F && !G && !a && !b; }
};

SparseMatrix mass_matrix(const SpaceMesh& mesh);
// Throws std::invalid_argument if kappa < 1 at any quadrature point.
SparseMatrix stiffness_matrix(const SpaceMesh& mesh, const SpaceFn& kappa);
// Entry (i, j) = integral of psi * phi_j * phi_i'.
SparseMatrix advection_matrix(const SpaceMesh& mesh, const SpaceFn& psi);
// Entry (i, j) = integral of psi * phi_j * phi_i.
SparseMatrix reaction_matrix(const SpaceMesh& mesh, const SpaceFn& psi);
Eigen::VectorXd load_vector(const SpaceMesh& mesh, const SpaceFn& f);
// L2 projection onto the interior hat functions.
Eigen::VectorXd project(const SpaceMesh& mesh, const SpaceFn& f);

// Matrices of the weak form at one time level.  Zero coefficients give empty matrices.
struct FEMSystem {
    SparseMatrix M, K;
    SparseMatrix A_F, A_G, R_a, R_b;      // coefficient at time t
    SparseMatrix A_dF, A_dG, R_da, R_db;  // time derivative of the coefficient at time t
};

FEMSystem assemble(const CoefficientField& coeffs, const SpaceMesh& mesh, double t);

// Generalized eigenpairs K phi = lambda M phi with phi^T M phi = 1, ascending.
struct SpectralDecomposition {
    Eigen::VectorXd lambda;
    Eigen::MatrixXd phi;
    SparseMatrix M;

    static SpectralDecomposition compute(const SparseMatrix& K, const SparseMatrix& M);
    // Coordinates phi_k^T M v.
    Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const;
};

// (sum_k lambda_k^mu <v, M phi_k>^2)^(1/2) for 0 <= mu <= 2.
double hmu_norm(double mu, const Eigen::VectorXd& v, const SpectralDecomposition& spectral);

double l2_norm(const Eigen::VectorXd& v, const SparseMatrix& M);
double energy_norm(const Eigen::VectorXd& v, const SparseMatrix& K);

} // namespace fracreg::fem
