#pragma once

#include "fracreg/femcore.hpp"
#include "fracreg/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracreg::solver {

using TimeFn = std::function<double(double)>;

// Source term g(x, t).  When the time factor of a separable source s(t) h(x) has a known
// antiderivative S with S(0) = 0, I^1 g is formed exactly as S(t) h(x); this handles weakly
// singular s such as t^(eta-1).  Otherwise I^1 g is taken by the trapezoidal rule on the
// projected nodal values, which must then be finite at t = 0.
struct Source {
    fem::SpaceTimeFn g;
    fem::SpaceFn space;
    TimeFn time, time_integral;

    bool is_zero() const { return !g && !space; }
    bool separable() const { return space && time && time_integral; }
    static Source separable_source(fem::SpaceFn h, TimeFn s, TimeFn s_integral);
};

struct ProblemSpec {
    double alpha = 0.5;
    double T = 1.0;
    fem::CoefficientField coeffs;
    Source source;
    double source_M = 0;    // |g^(j)(t)| <= M t^(eta - 1 - j)
    double source_eta = 1;
    fem::SpaceFn u0 = [](double) { return 0.0; };
    double u0_regularity_mu = 0; // u0 lies in the domain of A^(mu/2)

    void validate() const;
};

struct SchemeConfig {
    std::size_t N = 256;
    double gamma = 1.0;
    std::size_t n_x = 64;
    double linear_tol = 1e-10; // relative residual accepted from the sparse solve
};

// States as columns over the time mesh; column 0 is the projection of u0.
struct Trajectory {
    GradedMesh mesh;
    fem::SpaceMesh space;
    Series states;
    std::string provenance;
    std::vector<std::string> warnings;

    Eigen::VectorXd at(std::size_t n) const { return states.at(n); }
};

// f(t_n) = P u0 + I^1 (P g)(t_n).
Series f_rhs(const ProblemSpec& problem, const GradedMesh& mesh, const fem::SpaceMesh& space);

// Collocation of the time-integrated weak form at every node.  Memory terms use product
// integration on the piecewise-linear trajectory; the advection and reaction memory terms use
// their integrated-by-parts forms with the supplied coefficient time derivatives.
Trajectory solve_weak(const ProblemSpec& problem, const SchemeConfig& scheme);

// Modal solution sum_k c_k E_alpha(-lambda_k t^alpha) phi_k of the constant-coefficient,
// source-free problem, built on the discrete eigenpairs of the same finite element space.
class SpectralSolution {
public:
    // modes = 0 keeps every eigenpair.
    SpectralSolution(const ProblemSpec& problem, std::size_t n_x, std::size_t modes = 0);

    double alpha() const { return alpha_; }
    std::size_t modes() const { return static_cast<std::size_t>(coeff_.size()); }
    const fem::SpaceMesh& space() const { return space_; }
    const fem::SpectralDecomposition& spectral() const { return spectral_; }
    const Eigen::VectorXd& coefficients() const { return coeff_; }
    const Eigen::VectorXd& initial() const { return u0_; }
    // Bound on the M-norm of the dropped modes, valid uniformly in t.
    double tail_bound() const { return tail_; }

    // Modal amplitudes (per retained mode) of d^m u, of d^m I^alpha u, and of
    // d^m I^alpha (u - u0) at t > 0.  m = 0 in the first gives u itself.
    Eigen::VectorXd derivative_modes(int m, double t) const;
    Eigen::VectorXd frac_derivative_modes(int m, double t) const;
    Eigen::VectorXd frac_increment_modes(int m, double t) const;
    // Modal amplitudes of u(t) - u0 projected onto the retained modes.
    Eigen::VectorXd increment_modes(double t) const;

    Eigen::VectorXd state(double t) const;
    // (sum_k lambda_k^nu x_k^2)^(1/2) for modal amplitudes x.
    double modal_norm(double nu, const Eigen::VectorXd& x) const;

private:
    double alpha_;
    fem::SpaceMesh space_;
    fem::SpectralDecomposition spectral_;
    Eigen::VectorXd coeff_;
    Eigen::VectorXd u0_;
    double tail_ = 0;
};

// Trajectory of the modal solution on a time mesh.  Records a warning when the dropped-mode
// bound exceeds tail_tol relative to |P u0|.
Trajectory solve_spectral_const(const ProblemSpec& problem, const SchemeConfig& scheme, std::size_t modes = 0,
                                double tail_tol = 1e-8);

// m-th time derivative by local differences; node 0 is undefined.  Throws
// InsufficientSmoothness when N < 8m.  m = 0 returns the states.
Series time_derivative(const Trajectory& traj, int m);
// d^m I^alpha u, i.e. the Riemann-Liouville derivative of order m - alpha.
Series frac_time_derivative(const Trajectory& traj, int m, double alpha);

} // namespace fracreg::solver
