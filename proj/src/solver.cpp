#include "fracreg/solver.hpp"
#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace fracreg::solver {

using fem::SparseMatrix;

Source Source::separable_source(fem::SpaceFn h, TimeFn s, TimeFn s_integral)
{
    Source src;
    src.g = [h, s](double x, double t) { return s(t) * h(x); };
    src.space = std::move(h);
    src.time = std::move(s);
    src.time_integral = std::move(s_integral);
    return src;
}

void ProblemSpec::validate() const
{
    if (!(alpha > 0 && alpha < 1))
        throw std::invalid_argument("problem: alpha must lie in (0, 1)");
    if (!(T > 0) || !std::isfinite(T))
        throw std::invalid_argument("problem: T must be positive");
    if (!(source_M >= 0))
        throw std::invalid_argument("problem: source bound M must be >= 0");
    if (!(source_eta > 0))
        throw std::invalid_argument("problem: source exponent eta must be positive");
    if (!(u0_regularity_mu >= 0 && u0_regularity_mu <= 2))
        throw std::invalid_argument("problem: u0 regularity must lie in [0, 2]");
    if (!u0)
        throw std::invalid_argument("problem: missing initial data");
    if (!coeffs.kappa)
        throw std::invalid_argument("problem: missing diffusivity");
}

namespace {

void check_scheme(const SchemeConfig& s)
{
    if (s.N < 1)
        throw std::invalid_argument("scheme: N must be >= 1");
    if (!(s.gamma >= 1))
        throw std::invalid_argument("scheme: gamma must be >= 1");
    if (s.n_x < 2)
        throw std::invalid_argument("scheme: n_x must be >= 2");
    if (!(s.linear_tol > 0))
        throw std::invalid_argument("scheme: linear-solver tolerance must be positive");
}

SparseMatrix or_zero(const SparseMatrix& A, Eigen::Index n)
{
    return A.size() == 0 ? SparseMatrix(n, n) : A;
}

} // namespace

Series f_rhs(const ProblemSpec& problem, const GradedMesh& mesh, const fem::SpaceMesh& space)
{
    const Eigen::VectorXd pu0 = fem::project(space, problem.u0);
    const auto d = static_cast<Eigen::Index>(space.dofs());
    Eigen::MatrixXd f(d, static_cast<Eigen::Index>(mesh.size()));
    f.colwise() = pu0;
    const Source& src = problem.source;
    if (src.is_zero())
        return Series(mesh, std::move(f));
    if (src.separable()) {
        const Eigen::VectorXd ph = fem::project(space, src.space);
        for (std::size_t n = 1; n < mesh.size(); ++n)
            f.col(static_cast<Eigen::Index>(n)) += src.time_integral(mesh[n]) * ph;
        return Series(mesh, std::move(f));
    }
    if (!src.g)
        throw std::invalid_argument("f_rhs: source has no evaluable form");
    auto proj_at = [&](double t) { return fem::project(space, [&](double x) { return src.g(x, t); }); };
    Eigen::VectorXd prev = proj_at(0.0);
    if (!prev.allFinite())
        throw std::invalid_argument("f_rhs: source is not finite at t = 0; supply a separable form");
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (std::size_t n = 1; n < mesh.size(); ++n) {
        Eigen::VectorXd cur = proj_at(mesh[n]);
        acc += 0.5 * mesh.step(n) * (prev + cur);
        f.col(static_cast<Eigen::Index>(n)) += acc;
        prev = std::move(cur);
    }
    return Series(mesh, std::move(f));
}

Trajectory solve_weak(const ProblemSpec& problem, const SchemeConfig& scheme)
{
    problem.validate();
    check_scheme(scheme);
    const GradedMesh mesh(problem.T, scheme.N, scheme.gamma);
    const fem::SpaceMesh space(scheme.n_x);
    const auto d = static_cast<Eigen::Index>(space.dofs());
    const auto S = static_cast<Eigen::Index>(mesh.size());
    const Series f = f_rhs(problem, mesh, space);
    const FracWeights Wa(mesh, problem.alpha);
    const auto& c = problem.coeffs;
    const bool varying = !c.constant_diffusion_only();

    const SparseMatrix M = fem::mass_matrix(space);
    const SparseMatrix K = fem::stiffness_matrix(space, c.kappa);
    // P multiplies I^alpha u, Q multiplies I^1 u; D1, D2 are their time derivatives inside the
    // trailing I^1 of the integrated-by-parts memory terms.
    SparseMatrix P = K, Q(d, d), D1(d, d), D2(d, d);

    Eigen::MatrixXd U(d, S);
    U.col(0) = f.values().col(0);
    Eigen::VectorXd X1 = Eigen::VectorXd::Zero(d);   // I^1 u at the previous node
    Eigen::VectorXd H = Eigen::VectorXd::Zero(d);    // D1 I^alpha u + D2 I^1 u at the previous node
    Eigen::VectorXd C = Eigen::VectorXd::Zero(d);    // I^1 H at the previous node
    Eigen::SparseLU<SparseMatrix> lu;
    bool pattern_done = false;

    for (Eigen::Index n = 1; n < S; ++n) {
        const auto nn = static_cast<std::size_t>(n);
        const double tn = mesh[nn], half = 0.5 * mesh.step(nn);
        if (varying) {
            const fem::FEMSystem sys = fem::assemble(c, space, tn);
            P = K - or_zero(sys.A_F, d) + or_zero(sys.R_a, d);
            Q = -or_zero(sys.A_G, d) + or_zero(sys.R_b, d);
            D1 = or_zero(sys.A_dF, d) - or_zero(sys.R_da, d);
            D2 = or_zero(sys.A_dG, d) - or_zero(sys.R_db, d);
        }
        const auto row = Wa.row(nn);
        const double wa = row[nn];
        Eigen::Map<const Eigen::VectorXd> hist_w(row.data(), n);
        const Eigen::VectorXd hist_a = U.leftCols(n) * hist_w;
        const Eigen::VectorXd hist_1 = X1 + half * U.col(n - 1);

        SparseMatrix A = M + wa * P;
        Eigen::VectorXd rhs = M * f.values().col(n) - P * hist_a - C - half * H;
        if (varying) {
            A += half * Q + half * (wa * D1 + half * D2);
            rhs -= Q * hist_1 + half * (D1 * hist_a + D2 * hist_1);
        }
        A.makeCompressed();
        if (!pattern_done) {
            lu.analyzePattern(A);
            pattern_done = true;
        }
        lu.factorize(A);
        if (lu.info() != Eigen::Success)
            throw SolveFailure(nn, "sparse factorization failed");
        Eigen::VectorXd u = lu.solve(rhs);
        if (!u.allFinite())
            throw SolveFailure(nn, "non-finite state");
        const double res = (A * u - rhs).norm();
        if (res > scheme.linear_tol * std::max(rhs.norm(), 1e-300) && res > 1e-14)
            throw SolveFailure(nn, "linear solve residual " + std::to_string(res));
        U.col(n) = u;
        const Eigen::VectorXd Xa = hist_a + wa * u;
        X1 = hist_1 + half * u;
        if (varying) {
            const Eigen::VectorXd Hn = D1 * Xa + D2 * X1;
            C += half * (H + Hn);
            H = Hn;
        }
    }
    return Trajectory{mesh, space, Series(mesh, std::move(U)), "weak", {}};
}

// ---------------------------------------------------------------------------------------------

namespace {

// Mittag-Leffler evaluators are costly to set up; share them by (beta, b).
std::shared_ptr<const MittagLeffler> ml_for(double beta, double b)
{
    static std::mutex mu;
    static std::map<std::pair<double, double>, std::shared_ptr<const MittagLeffler>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{beta, b}];
    if (!slot)
        slot = std::make_shared<const MittagLeffler>(beta, b);
    return slot;
}

} // namespace

SpectralSolution::SpectralSolution(const ProblemSpec& problem, std::size_t n_x, std::size_t modes)
    : alpha_(problem.alpha), space_(n_x)
{
    problem.validate();
    if (!problem.coeffs.constant_diffusion_only())
        throw HypothesisViolation("coefficients", "modal solution needs F = G = a = b = 0");
    if (!problem.source.is_zero())
        throw HypothesisViolation("source", "modal solution needs g = 0");
    const SparseMatrix M = fem::mass_matrix(space_);
    spectral_ = fem::SpectralDecomposition::compute(fem::stiffness_matrix(space_, problem.coeffs.kappa), M);
    u0_ = fem::project(space_, problem.u0);
    Eigen::VectorXd all = spectral_.coordinates(u0_);
    const auto avail = static_cast<std::size_t>(all.size());
    if (modes > avail)
        throw std::invalid_argument("modal solution: " + std::to_string(modes) + " modes requested, " +
                                    std::to_string(avail) + " available");
    const std::size_t keep = modes == 0 ? avail : modes;
    coeff_ = all.head(static_cast<Eigen::Index>(keep));
    tail_ = all.tail(static_cast<Eigen::Index>(avail - keep)).norm();
}

Eigen::VectorXd SpectralSolution::derivative_modes(int m, double t) const
{
    if (m < 0)
        throw std::invalid_argument("derivative_modes: m must be >= 0");
    if (m > 0 && !(t > 0))
        throw SingularAtOrigin("time derivative of the modal solution at t = 0");
    const auto ml = ml_for(alpha_, 1.0 - m);
    const double ta = std::pow(t, alpha_), s = m == 0 ? 1.0 : std::pow(t, -m);
    Eigen::VectorXd out(coeff_.size());
    for (Eigen::Index k = 0; k < coeff_.size(); ++k)
        out(k) = coeff_(k) * s * (*ml)(-spectral_.lambda(k) * ta);
    return out;
}

Eigen::VectorXd SpectralSolution::frac_derivative_modes(int m, double t) const
{
    if (m < 0)
        throw std::invalid_argument("frac_derivative_modes: m must be >= 0");
    if (!(t > 0))
        throw SingularAtOrigin("fractional derivative of the modal solution at t = 0");
    const auto ml = ml_for(alpha_, 1.0 + alpha_ - m);
    const double ta = std::pow(t, alpha_), s = std::pow(t, alpha_ - m);
    Eigen::VectorXd out(coeff_.size());
    for (Eigen::Index k = 0; k < coeff_.size(); ++k)
        out(k) = coeff_(k) * s * (*ml)(-spectral_.lambda(k) * ta);
    return out;
}

Eigen::VectorXd SpectralSolution::frac_increment_modes(int m, double t) const
{
    return frac_derivative_modes(m, t) - coeff_ * omega(alpha_ + 1 - m, t);
}

Eigen::VectorXd SpectralSolution::increment_modes(double t) const
{
    if (!(t >= 0))
        throw std::invalid_argument("increment_modes: t must be >= 0");
    // E_alpha(-z) - 1 = -z E_{alpha, 1 + alpha}(-z), free of cancellation for small z.
    const auto ml = ml_for(alpha_, 1.0 + alpha_);
    const double ta = std::pow(t, alpha_);
    Eigen::VectorXd out(coeff_.size());
    for (Eigen::Index k = 0; k < coeff_.size(); ++k) {
        const double z = spectral_.lambda(k) * ta;
        out(k) = -coeff_(k) * z * (*ml)(-z);
    }
    return out;
}

Eigen::VectorXd SpectralSolution::state(double t) const
{
    const Eigen::VectorXd x = t == 0 ? Eigen::VectorXd(coeff_) : derivative_modes(0, t);
    return spectral_.phi.leftCols(coeff_.size()) * x;
}

double SpectralSolution::modal_norm(double nu, const Eigen::VectorXd& x) const
{
    if (!(nu >= 0 && nu <= 2))
        throw std::invalid_argument("modal_norm: nu must lie in [0, 2]");
    double s = 0;
    for (Eigen::Index k = 0; k < x.size(); ++k)
        s += std::pow(spectral_.lambda(k), nu) * x(k) * x(k);
    return std::sqrt(s);
}

Trajectory solve_spectral_const(const ProblemSpec& problem, const SchemeConfig& scheme, std::size_t modes,
                                double tail_tol)
{
    check_scheme(scheme);
    const SpectralSolution sol(problem, scheme.n_x, modes);
    const GradedMesh mesh(problem.T, scheme.N, scheme.gamma);
    Eigen::MatrixXd U(static_cast<Eigen::Index>(sol.space().dofs()), static_cast<Eigen::Index>(mesh.size()));
    for (std::size_t n = 0; n < mesh.size(); ++n)
        U.col(static_cast<Eigen::Index>(n)) = sol.state(mesh[n]);
    Trajectory tr{mesh, sol.space(), Series(mesh, std::move(U)), "spectral", {}};
    const double ref = fem::l2_norm(sol.initial(), fem::mass_matrix(sol.space()));
    if (sol.tail_bound() > tail_tol * std::max(ref, 1e-300)) {
        std::ostringstream os;
        os << "truncation: dropped modes carry up to " << sol.tail_bound() << " of the initial L2 norm " << ref;
        tr.warnings.push_back(os.str());
    }
    return tr;
}

Series time_derivative(const Trajectory& traj, int m)
{
    if (m < 0)
        throw std::invalid_argument("time_derivative: m must be >= 0");
    if (m == 0)
        return traj.states;
    if (traj.mesh.N() < 8 * static_cast<std::size_t>(m))
        throw InsufficientSmoothness("time_derivative: need N >= " + std::to_string(8 * m));
    return differentiate(traj.states, m);
}

Series frac_time_derivative(const Trajectory& traj, int m, double alpha)
{
    if (m < 1)
        throw std::invalid_argument("frac_time_derivative: m must be >= 1");
    if (!(alpha > 0 && alpha <= 1))
        throw std::invalid_argument("frac_time_derivative: alpha must lie in (0, 1]");
    if (traj.mesh.N() < 8 * static_cast<std::size_t>(m))
        throw InsufficientSmoothness("frac_time_derivative: need N >= " + std::to_string(8 * m));
    return differentiate(frac_integral(alpha, traj.states), m);
}

} // namespace fracreg::solver
