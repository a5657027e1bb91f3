#include "fracreg/femcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fracreg::fem {

namespace {

// 3-point Gauss-Legendre on [0, 1].
constexpr std::array<double, 3> gx{0.1127016653792583, 0.5, 0.8872983346207417};
constexpr std::array<double, 3> gw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

using Triplets = std::vector<Eigen::Triplet<double>>;

// Calls body(e, local_i, local_j, dof_i, dof_j) for every pair of interior dofs on each cell.
template <class Body>
void for_cell_pairs(const SpaceMesh& mesh, Body&& body)
{
    const long nd = static_cast<long>(mesh.dofs());
    for (std::size_t e = 0; e < mesh.n_x; ++e) {
        const long dof[2] = {static_cast<long>(e) - 1, static_cast<long>(e)};
        for (int i = 0; i < 2; ++i) {
            if (dof[i] < 0 || dof[i] >= nd)
                continue;
            for (int j = 0; j < 2; ++j) {
                if (dof[j] < 0 || dof[j] >= nd)
                    continue;
                body(e, i, j, dof[i], dof[j]);
            }
        }
    }
}

SparseMatrix from_triplets(const SpaceMesh& mesh, const Triplets& t)
{
    const auto n = static_cast<Eigen::Index>(mesh.dofs());
    SparseMatrix A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
}

double basis(int local, double s)
{
    return local == 0 ? 1.0 - s : s;
}

double basis_dx(int local, double h)
{
    return local == 0 ? -1.0 / h : 1.0 / h;
}

} // namespace

SpaceMesh::SpaceMesh(std::size_t cells)
    : n_x(cells)
{
    if (cells < 2)
        throw std::invalid_argument("space mesh needs at least 2 cells");
}

SparseMatrix mass_matrix(const SpaceMesh& mesh)
{
    return reaction_matrix(mesh, [](double) { return 1.0; });
}

SparseMatrix stiffness_matrix(const SpaceMesh& mesh, const SpaceFn& kappa)
{
    const double h = mesh.h();
    std::vector<double> kbar(mesh.n_x);
    for (std::size_t e = 0; e < mesh.n_x; ++e) {
        double acc = 0;
        for (std::size_t g = 0; g < 3; ++g) {
            const double x = (static_cast<double>(e) + gx[g]) * h;
            const double k = kappa(x);
            if (!(k >= 1.0))
                throw std::invalid_argument("stiffness: kappa must be >= 1 (got " + std::to_string(k) +
                                            " at x=" + std::to_string(x) + ")");
            acc += gw[g] * k;
        }
        kbar[e] = acc * h;
    }
    Triplets t;
    for_cell_pairs(mesh, [&](std::size_t e, int i, int j, long di, long dj) {
        t.emplace_back(di, dj, kbar[e] * basis_dx(i, h) * basis_dx(j, h));
    });
    return from_triplets(mesh, t);
}

SparseMatrix advection_matrix(const SpaceMesh& mesh, const SpaceFn& psi)
{
    const double h = mesh.h();
    Triplets t;
    for_cell_pairs(mesh, [&](std::size_t e, int i, int j, long di, long dj) {
        double acc = 0;
        for (std::size_t g = 0; g < 3; ++g)
            acc += gw[g] * psi((static_cast<double>(e) + gx[g]) * h) * basis(j, gx[g]);
        t.emplace_back(di, dj, acc * h * basis_dx(i, h));
    });
    return from_triplets(mesh, t);
}

SparseMatrix reaction_matrix(const SpaceMesh& mesh, const SpaceFn& psi)
{
    const double h = mesh.h();
    Triplets t;
    for_cell_pairs(mesh, [&](std::size_t e, int i, int j, long di, long dj) {
        double acc = 0;
        for (std::size_t g = 0; g < 3; ++g)
            acc += gw[g] * psi((static_cast<double>(e) + gx[g]) * h) * basis(i, gx[g]) * basis(j, gx[g]);
        t.emplace_back(di, dj, acc * h);
    });
    return from_triplets(mesh, t);
}

Eigen::VectorXd load_vector(const SpaceMesh& mesh, const SpaceFn& f)
{
    const double h = mesh.h();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.dofs()));
    const long nd = static_cast<long>(mesh.dofs());
    for (std::size_t e = 0; e < mesh.n_x; ++e) {
        const long dof[2] = {static_cast<long>(e) - 1, static_cast<long>(e)};
        for (std::size_t g = 0; g < 3; ++g) {
            const double fx = f((static_cast<double>(e) + gx[g]) * h);
            for (int i = 0; i < 2; ++i)
                if (dof[i] >= 0 && dof[i] < nd)
                    b(dof[i]) += gw[g] * fx * basis(i, gx[g]) * h;
        }
    }
    return b;
}

Eigen::VectorXd project(const SpaceMesh& mesh, const SpaceFn& f)
{
    Eigen::SimplicialLDLT<SparseMatrix> solver(mass_matrix(mesh));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("project: mass matrix factorization failed");
    return solver.solve(load_vector(mesh, f));
}

FEMSystem assemble(const CoefficientField& c, const SpaceMesh& mesh, double t)
{
    FEMSystem s;
    s.M = mass_matrix(mesh);
    s.K = stiffness_matrix(mesh, c.kappa);
    auto at = [t](const SpaceTimeFn& f) { return [&f, t](double x) { return f(x, t); }; };
    const auto n = static_cast<Eigen::Index>(mesh.dofs());
    auto adv = [&](const SpaceTimeFn& f) { return f ? advection_matrix(mesh, at(f)) : SparseMatrix(n, n); };
    auto rea = [&](const SpaceTimeFn& f) { return f ? reaction_matrix(mesh, at(f)) : SparseMatrix(n, n); };
    s.A_F = adv(c.F);
    s.A_G = adv(c.G);
    s.R_a = rea(c.a);
    s.R_b = rea(c.b);
    s.A_dF = adv(c.dF);
    s.A_dG = adv(c.dG);
    s.R_da = rea(c.da);
    s.R_db = rea(c.db);
    return s;
}

SpectralDecomposition SpectralDecomposition::compute(const SparseMatrix& K, const SparseMatrix& M)
{
    const Eigen::MatrixXd Kd(K), Md(M);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Kd, Md);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("generalized eigensolve failed");
    SpectralDecomposition d{es.eigenvalues(), es.eigenvectors(), M};
    // Fix signs so that the largest-magnitude entry of each eigenvector is positive.
    for (Eigen::Index k = 0; k < d.phi.cols(); ++k) {
        Eigen::Index imax;
        d.phi.col(k).cwiseAbs().maxCoeff(&imax);
        if (d.phi(imax, k) < 0)
            d.phi.col(k) *= -1.0;
    }
    return d;
}

Eigen::VectorXd SpectralDecomposition::coordinates(const Eigen::VectorXd& v) const
{
    return phi.transpose() * (M * v);
}

double hmu_norm(double mu, const Eigen::VectorXd& v, const SpectralDecomposition& spectral)
{
    if (!(mu >= 0 && mu <= 2))
        throw std::invalid_argument("hmu_norm: mu must lie in [0, 2]");
    const Eigen::VectorXd c = spectral.coordinates(v);
    double s = 0;
    for (Eigen::Index k = 0; k < c.size(); ++k)
        s += std::pow(spectral.lambda(k), mu) * c(k) * c(k);
    return std::sqrt(s);
}

double l2_norm(const Eigen::VectorXd& v, const SparseMatrix& M)
{
    return std::sqrt(std::max(0.0, v.dot(M * v)));
}

double energy_norm(const Eigen::VectorXd& v, const SparseMatrix& K)
{
    return std::sqrt(std::max(0.0, v.dot(K * v)));
}

} // namespace fracreg::fem
