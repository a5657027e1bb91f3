#pragma once

#include "fracreg/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace fracreg::quad {

using TimeFn = std::function<double(double)>;

// Inner product on spatial coefficient vectors: plain dot product, or x^T G y for an SPD Gram
// matrix G (a mass matrix, or a stiffness matrix for gradient norms).
class InnerProductContext {
public:
    InnerProductContext() = default;
    explicit InnerProductContext(Eigen::MatrixXd gram);
    explicit InnerProductContext(const Eigen::SparseMatrix<double>& gram);
    static InnerProductContext scalar() { return {}; }

    bool is_scalar() const { return gram_.size() == 0; }
    double inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    double norm(const Eigen::VectorXd& x) const;
    // Row i of the result is <A.row(i), B.row(i)>.
    Eigen::VectorXd rowwise(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;

private:
    Eigen::MatrixXd gram_;
};

// Linear on every cell, possibly discontinuous at nodes.  Column k of left/right holds the
// values at the two ends of cell k.
struct CellwiseLinear {
    GradedMesh mesh;
    Eigen::MatrixXd left, right;

    std::size_t dim() const { return static_cast<std::size_t>(left.rows()); }
    static CellwiseLinear from_series(const Series& s);
    // Piecewise-constant derivative of the interpolant.
    static CellwiseLinear derivative_of(const Series& s);
};

// Each cell is split into `levels` geometric sub-cells shrinking toward its left end (where
// I^mu of piecewise-linear data is singular) plus one innermost piece; every sub-cell carries
// a `points`-point Gauss-Legendre rule.
struct QuadRule {
    int levels = 8;
    int points = 5;
    double ratio = 0.3;

    int subcells() const { return levels + 1; }
    // Default rule, thinned for long meshes to bound the weight storage.
    static QuadRule for_mesh(std::size_t N);
};

// Cached product-integration weights of I^mu at the quadrature points of a fixed mesh.
class QuadEvaluator {
public:
    QuadEvaluator(const GradedMesh& mesh, double mu, QuadRule rule = {}, bool refined_nodes = false);

    double mu() const { return mu_; }
    const GradedMesh& mesh() const { return mesh_; }
    const QuadRule& rule() const { return rule_; }
    // Mesh whose nodes are all sub-cell boundaries.
    const GradedMesh& refined() const { return refined_; }
    std::size_t refined_index(std::size_t node) const { return node * static_cast<std::size_t>(rule_.subcells()); }
    std::size_t num_points() const { return s_.size(); }
    const std::vector<double>& points() const { return s_; }

    // points x dim
    Eigen::MatrixXd values(const CellwiseLinear& f) const;
    Eigen::MatrixXd frac_values(const CellwiseLinear& f) const;
    // dim x refined nodes; requires refined_nodes at construction.
    Eigen::MatrixXd frac_at_refined(const CellwiseLinear& f) const;
    // Running integral of point values, sampled at every refined node.
    Eigen::VectorXd running_integral(const Eigen::VectorXd& integrand) const;
    // Same, sampled at the original nodes.
    std::vector<double> node_integrals(const Eigen::VectorXd& integrand) const;

private:
    GradedMesh mesh_;
    double mu_;
    QuadRule rule_;
    GradedMesh refined_;
    std::vector<double> s_, w_, frac_;     // point, weight, position within its cell in [0,1]
    std::vector<Eigen::MatrixXd> blocks_;  // per cell: points_per_cell x 2(k+1)
    Eigen::MatrixXd refined_weights_;      // refined nodes x 2N
};

// Shares evaluators across checks that use the same (mesh, mu).
class EvaluatorCache {
public:
    explicit EvaluatorCache(QuadRule rule = {}, bool refined_nodes = false)
        : rule_(rule), refined_(refined_nodes) {}
    std::shared_ptr<const QuadEvaluator> get(const GradedMesh& mesh, double mu);

private:
    QuadRule rule_;
    bool refined_;
    std::mutex mutex_;
    std::vector<std::pair<std::pair<GradedMesh, double>, std::shared_ptr<const QuadEvaluator>>> items_;
};

// int_0^{t_n} <phi, I^mu psi> ds at every node n.
std::vector<double> cross_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const CellwiseLinear& psi,
                                const InnerProductContext& ctx);
std::vector<double> q1_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const InnerProductContext& ctx);
std::vector<double> q2_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const InnerProductContext& ctx);

// Q_1^mu(phi, t_n) = int_0^t <phi, I^mu phi>,  Q_2^mu(phi, t_n) = int_0^t |I^mu phi|^2.
double q1(double mu, const Series& phi, std::size_t t_index, const InnerProductContext& ctx = {});
double q2(double mu, const Series& phi, std::size_t t_index, const InnerProductContext& ctx = {});

// (M^j phi)^(j) = sum_i a_i t^(j-i) phi^(j-i), the derivatives taken by local differences away
// from t = 0.  At t = 0 the terms with a derivative are set to their limit 0.
Series mj_transform(const Series& phi, int j);

// Q_which^mu((M^j phi)^(j), t_n), which in {1, 2}.
double q_mj(double mu, int j, const Series& phi, int which, std::size_t t_index,
            const InnerProductContext& ctx = {});

// psi I^mu phi - I^1(psi' I^mu phi) at the nodes; psi and dpsi are scalar series on the mesh
// of phi.  Requires 0 <= mu <= 1.
Series b_op(double mu, const Series& psi, const Series& dpsi, const Series& phi);
// I^1(psi d^(1-mu) phi), the form before integration by parts.  Used as a cross-check for
// phi(0) = 0.
Series b_op_direct(double mu, const Series& psi, const Series& phi);
// (M^j B phi)^(j).
Series b_op_mj(double mu, int j, const Series& psi, const Series& dpsi, const Series& phi);

struct IneqReport {
    std::string id;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;   // rhs - lhs
    double tol = 0;
    // For checks with unquantified constants the pass criterion is uniform boundedness of
    // lhs/rhs across refinement; margin is informative only.
    bool ratio_only = false;
    std::map<std::string, double> params;

    double ratio() const { return lhs / rhs; }
    bool violated() const { return !ratio_only && margin < -tol; }
};

struct InequalityParams {
    double alpha = 0.5;
    double epsilon = 1.0;
    double mu = 0.0;
    double nu = 1.0;
    int m = 1;
    std::optional<std::size_t> t_index; // default: last node
};

struct InequalityInputs {
    std::optional<Series> phi;
    std::optional<Series> psi;                  // second function of the cross-term bound
    std::optional<Series> f;                    // data of the stability bound
    TimeFn multiplier, multiplier_dt;           // psi(t), psi'(t) for the memory-operator bounds
    InnerProductContext ctx;
    std::optional<InnerProductContext> grad_ctx;
};

// Supported ids: 2.2-A, 2.2-B, 2.2-C, 2.3-i, 2.3-ii, 2.3-iii, 2.4, 3.1-first, 3.1-second, A.2,
// A.3.  Throws HypothesisViolation when the inputs do not meet the hypotheses.
IneqReport check_inequality(const std::string& id, const InequalityParams& params, const InequalityInputs& inputs);
IneqReport check_inequality(EvaluatorCache& cache, const std::string& id, const InequalityParams& params,
                            const InequalityInputs& inputs);

struct GronwallReport {
    Series bound;
    bool premise_holds = false;
    bool violated = false;
    double max_excess = 0;     // max_n (q - bound), unscaled
    double premise_defect = 0; // max_n (q - a - b I^beta q), unscaled
};

// Checks 0 <= q <= a + b I^beta q on the nodes (to a tolerance built from a halved-mesh
// estimate of the product-integration error), then compares q with a E_beta(b t^beta).
GronwallReport gronwall_bound(const TimeFn& a, const TimeFn& b, double beta, const Series& q);

// Seeded randomized suites.  Random inputs are piecewise-linear with values from a 64-bit
// Mersenne twister; half are i.i.d. normal, half are scaled random walks.
std::vector<IneqReport> positivity_suite(std::uint64_t seed, int count, const std::vector<double>& mus,
                                         std::size_t N);
struct LemmaSuiteConfig {
    std::uint64_t seed = 1;
    int count = 100;
    std::size_t N = 256;
    std::vector<double> alphas{0.25, 0.5, 0.75};
    std::vector<double> epsilons{0.5, 1.0, 2.0};
};
// lemma in {2.2, 2.3, 2.4}.
std::vector<IneqReport> lemma_suite(const std::string& lemma, const LemmaSuiteConfig& cfg);
// Premises built by Picard iteration q <- a + b I^beta q from q = 0 with random linear a,
// constant b and beta.
std::vector<GronwallReport> gronwall_suite(std::uint64_t seed, int count, std::size_t N);

Series random_series(std::mt19937_64& rng, const GradedMesh& mesh, bool start_at_zero = false);

} // namespace fracreg::quad
