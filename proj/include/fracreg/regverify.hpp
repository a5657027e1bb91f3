#pragma once

#include "fracreg/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fracreg::reg {

struct RateEstimate {
    double exponent = 0;
    double stderr_ = 0;
    double intercept = 0;
    double t_lo = 0, t_hi = 0;
    std::size_t samples = 0;
};

// Least-squares slope of log(value) against log(t) over samples with t in [t_lo, t_hi].
// Needs at least 8 samples in the window, all with positive values.
RateEstimate estimate_exponent(const std::vector<std::pair<double, double>>& samples, double t_lo, double t_hi);

// Norm series whose small-t decay is measured.  m is the number of time derivatives.
//   dt        |d^m u|                  (L2)
//   dt-norm   |d^m u|_nu               (spectral norm of index nu)
//   grad-dt   |grad d^m u|             (nu = 1)
//   frac      |d^m I^alpha u|
//   frac-inc  |d^m I^alpha (u - u0)|
//   inc       |u - u0|                 (m = 0)
struct RateQuery {
    std::string theorem;   // cor3.4, thm4.1, thm4.2, thm4.3
    std::string quantity;
    int m = 1;
    double nu = 0;         // norm index for dt-norm
    bool edge = false;     // data regularity at the edge of its admissible range
};

// Predicted exponent for problem data of regularity mu.  Throws HypothesisViolation for
// combinations the table does not cover.
double predicted_exponent(const RateQuery& q, double alpha, double mu);

struct RateReport {
    RateQuery query;
    double alpha = 0, mu = 0;
    double predicted = 0;
    RateEstimate estimate;
    double refined_exponent = 0;  // same fit with N and n_x doubled
    double tol = 0;
    bool mesh_independent = false;
    bool pass = false;
    std::string method;           // spectral or weak
    std::string note;
};

// Measures the quantity on [1e-3 T, 1e-1 T].  Uses the modal solution when the coefficients and
// source permit, otherwise the weak solver.  Before the verdict the fit is repeated with N and
// n_x doubled and must move by at most half the tolerance.  tol <= 0 picks the default (0.05
// modal, 0.1 weak or at the regularity edge).
RateReport verify_rate(const RateQuery& q, const solver::ProblemSpec& problem, const solver::SchemeConfig& scheme,
                       double tol = 0);

// Exponent of |u(t) - u0| against alpha mu / 2 for source-free data.
RateReport verify_u_continuity(const solver::ProblemSpec& problem, const solver::SchemeConfig& scheme,
                               bool edge = false, double tol = 0);

// sup_n |u(t_n)| / (|u0| + M t_n^eta) and sup_n t_n^(alpha/2) |grad u(t_n)| / (|u0| + M t_n^eta)
// for the weak solution at each N.
struct BoundednessReport {
    std::vector<std::size_t> N;
    std::vector<double> sup_value, sup_gradient;
    double slack = 0;
    bool non_increasing = false;
    // Successive changes of each supremum shrink, i.e. the sequence is settling to a limit.
    bool bounded = false;
};
// Non-increasing means each refinement grows a supremum by at most `slack` relative.
BoundednessReport boundedness(const solver::ProblemSpec& problem, const solver::SchemeConfig& scheme,
                              const std::vector<std::size_t>& Ns, double slack = 0);

// Largest magnitude at t = 0 of the discrete I^alpha u, I^alpha grad u, B1 u and B2 u.
double initial_memory_terms(const solver::ProblemSpec& problem, const solver::Trajectory& traj);

// Ratios of the two stability bounds (left side over data side) at t = T, for the weak solution.
struct StabilityRatios {
    double first = 0;   // (Q1^{alpha,m}(u) + Q2^{alpha,m}(grad u)) / (t^alpha sum_j Q^{0,j}(f))
    double second = 0;  // (Q^{0,m}(u) + Q1^{alpha,m}(grad u)) / sum_j Q^{0,j}(f)
};
StabilityRatios stability_ratios(const solver::ProblemSpec& problem, const solver::SchemeConfig& scheme, int m);
// True when no ratio in the refinement sequence exceeds `growth` times the first one.
bool no_growth(const std::vector<double>& ratios, double growth);

// Weak solver against the modal solution: max over nodes of the L2 error, for each N.
struct ConvergenceReport {
    std::vector<std::size_t> N;
    std::vector<double> error;
    double order = 0;   // least-squares slope of -log error against log N
};
ConvergenceReport convergence(const solver::ProblemSpec& problem, const solver::SchemeConfig& scheme,
                              const std::vector<std::size_t>& Ns);

} // namespace fracreg::reg
