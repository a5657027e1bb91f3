#pragma once

#include "fracreg/mesh.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace fracreg {

// Riemann-Liouville kernel t^(mu-1)/Gamma(mu); exactly zero when mu is a non-positive integer.
double omega(double mu, double t);

// Product-integration weights for I^mu applied to the piecewise-linear interpolant of nodal
// values.  Row n holds the weights of nodes 0..n for the target t_n; row 0 is empty (I^mu = 0).
class FracWeights {
public:
    FracWeights(const GradedMesh& mesh, double mu);

    double mu() const { return mu_; }
    const GradedMesh& mesh() const { return mesh_; }
    std::span<const double> row(std::size_t n) const;

    // values: one column per node.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
    Series apply(const Series& s) const;

private:
    GradedMesh mesh_;
    double mu_;
    std::vector<double> packed_;
    std::vector<std::size_t> offset_;
};

// Weights for I^mu evaluated at an arbitrary point s in (0, T] of data that is linear on each
// cell but may jump at nodes.  left[k] and right[k] multiply the values at the left and right
// ends of cell k; cells at or beyond s get zero weight.
void cell_weights_at(const GradedMesh& mesh, double mu, double s, std::vector<double>& left,
                     std::vector<double>& right);

// Weights of one cell [tk, tk1] lying below s, for left/right end values.
void interval_weights(double mu, double s, double tk, double tk1, double& wl, double& wr);

Series frac_integral(double mu, const Series& s);

// Finite-difference weights (Fornberg) for the derivative of the given order at x0.
std::vector<double> fd_weights(double x0, std::span<const double> x, int order);

// m-th time derivative by local polynomial differences on the (possibly graded) mesh.  Node 0
// is left undefined unless include_origin is set, in which case a one-sided stencil is used.
Series differentiate(const Series& s, int m, bool include_origin = false);

// d/dt I^alpha, undefined at node 0.
Series rl_derivative(double alpha, const Series& s);

// Right-hand side of the shift identity
//   d^m/dt^m I^mu phi = I^mu d^m phi + sum_{j<m} phi^(j)(0) omega_{mu-m+1+j}
// assembled from discrete pieces.  Undefined at node 0.
Series fi_omega_shift(int m, double mu, const Series& phi, std::span<const double> initial_derivatives);

// Two-parameter Mittag-Leffler function E_{beta,b}(z) for real z.
class MittagLeffler {
public:
    enum class Route { series, asymptotic, integral };

    MittagLeffler(double beta, double b = 1.0);

    double beta() const { return beta_; }
    double b() const { return b_; }

    double operator()(double z) const;
    Route route(double z) const;

    // Individual evaluation paths, exposed for cross-checks.  Each throws EvaluationFailure
    // when it cannot deliver a result to working accuracy.
    double by_series(double z) const;
    double by_asymptotic(double z) const;
    double by_integral(double z) const;
    bool series_feasible(double z) const;
    bool asymptotic_accurate(double z) const;

    static constexpr double z_switch = 5.0;
    static constexpr double band_lo = 4.0;
    static constexpr double band_hi = 6.0;
    static constexpr double band_tol = 1e-8;

private:
    __float128 rgamma_coeff(std::size_t k) const;

    double beta_;
    double b_;
    std::vector<__float128> rgamma_;
};

double mittag_leffler(double beta, double b, double z);
inline double mittag_leffler(double beta, double z) { return mittag_leffler(beta, 1.0, z); }

} // namespace fracreg
