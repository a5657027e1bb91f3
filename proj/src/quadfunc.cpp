#include "fracreg/quadfunc.hpp"
#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"
#include "fracreg/identities.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracreg::quad {

namespace {

template <int P>
void fill_gauss(std::vector<double>& x, std::vector<double>& w)
{
    using G = boost::math::quadrature::gauss<double, P>;
    const auto& a = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) {
            x.push_back(0.5);
            w.push_back(0.5 * wt[i]);
        } else {
            x.push_back(0.5 - 0.5 * a[i]);
            w.push_back(0.5 * wt[i]);
            x.push_back(0.5 + 0.5 * a[i]);
            w.push_back(0.5 * wt[i]);
        }
    }
}

// Gauss-Legendre rule on [0, 1].
void gauss_rule(int P, std::vector<double>& x, std::vector<double>& w)
{
    x.clear();
    w.clear();
    switch (P) {
    case 2: fill_gauss<2>(x, w); break;
    case 3: fill_gauss<3>(x, w); break;
    case 4: fill_gauss<4>(x, w); break;
    case 5: fill_gauss<5>(x, w); break;
    case 6: fill_gauss<6>(x, w); break;
    case 8: fill_gauss<8>(x, w); break;
    default: throw std::invalid_argument("quadrature rule: unsupported point count " + std::to_string(P));
    }
}

// Sub-cell boundaries as fractions of the cell length, from 0 to 1.
std::vector<double> subcell_bounds(const QuadRule& r)
{
    std::vector<double> b{0.0};
    for (int i = r.levels; i >= 1; --i)
        b.push_back(std::pow(r.ratio, i));
    b.push_back(1.0);
    return b;
}

// Rows: 0..N-1 left values, N..2N-1 right values (cells 0..k only when truncated).
Eigen::MatrixXd stacked(const CellwiseLinear& f, std::size_t cells)
{
    const auto c = static_cast<Eigen::Index>(cells);
    Eigen::MatrixXd F(2 * c, f.left.rows());
    F.topRows(c) = f.left.leftCols(c).transpose();
    F.bottomRows(c) = f.right.leftCols(c).transpose();
    return F;
}

void check_mesh(const GradedMesh& a, const GradedMesh& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": series live on different meshes");
}

// I^mu at s of the piecewise-linear interpolant of nodal values on an arbitrary mesh.
double frac_at(const GradedMesh& mesh, const std::vector<double>& v, double mu, double s)
{
    if (mu == 0) {
        const std::size_t k = mesh.lower_index(s);
        if (k < mesh.size() && mesh[k] == s)
            return v[k];
        const double x = (s - mesh[k - 1]) / mesh.step(k);
        return (1 - x) * v[k - 1] + x * v[k];
    }
    std::vector<double> l, r;
    cell_weights_at(mesh, mu, s, l, r);
    double acc = 0;
    for (std::size_t k = 0; k < l.size(); ++k)
        acc += l[k] * v[k] + r[k] * v[k + 1];
    return acc;
}

Series scale_columns(const Series& s, const Eigen::VectorXd& c)
{
    Eigen::MatrixXd v = s.values();
    for (Eigen::Index n = 0; n < v.cols(); ++n)
        v.col(n) *= c(n);
    return Series(s.mesh(), std::move(v), s.first_defined());
}

Eigen::VectorXd sample(const GradedMesh& mesh, const TimeFn& f)
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(mesh.size()));
    for (std::size_t n = 0; n < mesh.size(); ++n)
        v(static_cast<Eigen::Index>(n)) = f(mesh[n]);
    return v;
}

Eigen::MatrixXd frac_nodes(double mu, const Series& s)
{
    if (mu == 0)
        return s.values();
    return FracWeights(s.mesh(), mu).apply(s.values());
}

} // namespace

// ---------------------------------------------------------------------------------------------

InnerProductContext::InnerProductContext(Eigen::MatrixXd gram)
    : gram_(std::move(gram))
{
    if (gram_.rows() != gram_.cols() || gram_.rows() == 0)
        throw std::invalid_argument("inner product: Gram matrix must be square and non-empty");
    if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * gram_.cwiseAbs().maxCoeff())
        throw std::invalid_argument("inner product: Gram matrix must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(gram_).info() != Eigen::Success)
        throw std::invalid_argument("inner product: Gram matrix must be positive definite");
}

InnerProductContext::InnerProductContext(const Eigen::SparseMatrix<double>& gram)
    : InnerProductContext(Eigen::MatrixXd(gram))
{
}

double InnerProductContext::inner(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const
{
    return is_scalar() ? x.dot(y) : x.dot(gram_ * y);
}

double InnerProductContext::norm(const Eigen::VectorXd& x) const
{
    return std::sqrt(std::max(0.0, inner(x, x)));
}

Eigen::VectorXd InnerProductContext::rowwise(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const
{
    if (is_scalar())
        return A.cwiseProduct(B).rowwise().sum();
    if (A.cols() != gram_.rows())
        throw std::invalid_argument("inner product: dimension mismatch");
    return (A * gram_).cwiseProduct(B).rowwise().sum();
}

CellwiseLinear CellwiseLinear::from_series(const Series& s)
{
    if (s.first_defined() != 0)
        throw SingularAtOrigin("quadratic functionals need a series defined at t = 0");
    const auto N = static_cast<Eigen::Index>(s.mesh().N());
    return {s.mesh(), s.values().leftCols(N), s.values().rightCols(N)};
}

CellwiseLinear CellwiseLinear::derivative_of(const Series& s)
{
    if (s.first_defined() != 0)
        throw SingularAtOrigin("derivative of a series undefined at t = 0");
    const auto N = static_cast<Eigen::Index>(s.mesh().N());
    Eigen::MatrixXd d = s.values().rightCols(N) - s.values().leftCols(N);
    for (Eigen::Index k = 0; k < N; ++k)
        d.col(k) /= s.mesh().step(static_cast<std::size_t>(k) + 1);
    return {s.mesh(), d, d};
}

QuadRule QuadRule::for_mesh(std::size_t N)
{
    const double n2 = static_cast<double>(N) * static_cast<double>(N);
    for (QuadRule r : {QuadRule{8, 5, 0.3}, QuadRule{6, 4, 0.3}, QuadRule{4, 3, 0.3}, QuadRule{2, 3, 0.3}})
        if (r.subcells() * r.points * n2 <= 4e6)
            return r;
    return QuadRule{0, 3, 0.3};
}

QuadEvaluator::QuadEvaluator(const GradedMesh& mesh, double mu, QuadRule rule, bool refined_nodes)
    : mesh_(mesh), mu_(mu), rule_(rule), refined_(std::vector<double>{0.0, 1.0})
{
    if (!(mu >= 0) || !std::isfinite(mu))
        throw std::invalid_argument("quadratic functional: mu must be >= 0");
    if (rule.levels < 0 || !(rule.ratio > 0 && rule.ratio < 1))
        throw std::invalid_argument("quadrature rule: bad grading parameters");
    std::vector<double> gx, gw;
    gauss_rule(rule.points, gx, gw);
    const auto bounds = subcell_bounds(rule);
    const std::size_t N = mesh.N();

    std::vector<double> rnodes;
    rnodes.reserve(N * bounds.size());
    for (std::size_t k = 0; k < N; ++k) {
        const double tk = mesh[k], tau = mesh.step(k + 1);
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            rnodes.push_back(i == 0 ? tk : tk + tau * bounds[i]);
            const double len = bounds[i + 1] - bounds[i];
            for (std::size_t g = 0; g < gx.size(); ++g) {
                const double x = bounds[i] + len * gx[g];
                s_.push_back(tk + tau * x);
                w_.push_back(tau * len * gw[g]);
                frac_.push_back(x);
            }
        }
    }
    rnodes.push_back(mesh.T());
    refined_ = GradedMesh(std::move(rnodes));

    if (mu > 0) {
        const std::size_t ppc = s_.size() / N;
        std::vector<double> l, r;
        blocks_.resize(N);
        for (std::size_t k = 0; k < N; ++k) {
            const auto kc = static_cast<Eigen::Index>(k + 1);
            Eigen::MatrixXd B(static_cast<Eigen::Index>(ppc), 2 * kc);
            for (std::size_t p = 0; p < ppc; ++p) {
                cell_weights_at(mesh, mu, s_[k * ppc + p], l, r);
                for (Eigen::Index c = 0; c < kc; ++c) {
                    B(static_cast<Eigen::Index>(p), c) = l[static_cast<std::size_t>(c)];
                    B(static_cast<Eigen::Index>(p), kc + c) = r[static_cast<std::size_t>(c)];
                }
            }
            blocks_[k] = std::move(B);
        }
        if (refined_nodes) {
            const auto R = static_cast<Eigen::Index>(refined_.size());
            refined_weights_.setZero(R, 2 * static_cast<Eigen::Index>(N));
            for (Eigen::Index i = 1; i < R; ++i) {
                cell_weights_at(mesh, mu, refined_[static_cast<std::size_t>(i)], l, r);
                for (std::size_t c = 0; c < N; ++c) {
                    refined_weights_(i, static_cast<Eigen::Index>(c)) = l[c];
                    refined_weights_(i, static_cast<Eigen::Index>(N + c)) = r[c];
                }
            }
        }
    }
}

Eigen::MatrixXd QuadEvaluator::values(const CellwiseLinear& f) const
{
    check_mesh(mesh_, f.mesh, "quadrature");
    const std::size_t ppc = s_.size() / mesh_.N();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(s_.size()), f.left.rows());
    for (std::size_t p = 0; p < s_.size(); ++p) {
        const auto k = static_cast<Eigen::Index>(p / ppc);
        const double x = frac_[p];
        out.row(static_cast<Eigen::Index>(p)) = ((1 - x) * f.left.col(k) + x * f.right.col(k)).transpose();
    }
    return out;
}

Eigen::MatrixXd QuadEvaluator::frac_values(const CellwiseLinear& f) const
{
    if (mu_ == 0)
        return values(f);
    check_mesh(mesh_, f.mesh, "quadrature");
    const std::size_t N = mesh_.N();
    const auto ppc = static_cast<Eigen::Index>(s_.size() / N);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(s_.size()), f.left.rows());
    for (std::size_t k = 0; k < N; ++k)
        out.middleRows(static_cast<Eigen::Index>(k) * ppc, ppc).noalias() = blocks_[k] * stacked(f, k + 1);
    return out;
}

Eigen::MatrixXd QuadEvaluator::frac_at_refined(const CellwiseLinear& f) const
{
    check_mesh(mesh_, f.mesh, "quadrature");
    const std::size_t N = mesh_.N();
    if (mu_ == 0) {
        const auto sub = static_cast<std::size_t>(rule_.subcells());
        const auto bounds = subcell_bounds(rule_);
        Eigen::MatrixXd out(f.left.rows(), static_cast<Eigen::Index>(refined_.size()));
        for (std::size_t i = 0; i + 1 < refined_.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i / sub);
            const double x = bounds[i % sub];
            out.col(static_cast<Eigen::Index>(i)) = (1 - x) * f.left.col(k) + x * f.right.col(k);
        }
        out.rightCols(1) = f.right.rightCols(1);
        return out;
    }
    if (refined_weights_.size() == 0)
        throw std::logic_error("quadrature: evaluator built without refined-node weights");
    return (refined_weights_ * stacked(f, N)).transpose();
}

Eigen::VectorXd QuadEvaluator::running_integral(const Eigen::VectorXd& g) const
{
    if (static_cast<std::size_t>(g.size()) != s_.size())
        throw std::invalid_argument("quadrature: integrand has wrong length");
    const auto P = static_cast<std::size_t>(rule_.points);
    Eigen::VectorXd out(static_cast<Eigen::Index>(refined_.size()));
    out(0) = 0;
    double acc = 0;
    for (std::size_t sc = 0; sc + 1 < refined_.size(); ++sc) {
        double part = 0;
        for (std::size_t p = sc * P; p < (sc + 1) * P; ++p)
            part += w_[p] * g(static_cast<Eigen::Index>(p));
        acc += part;
        out(static_cast<Eigen::Index>(sc + 1)) = acc;
    }
    return out;
}

std::vector<double> QuadEvaluator::node_integrals(const Eigen::VectorXd& g) const
{
    const Eigen::VectorXd r = running_integral(g);
    std::vector<double> out(mesh_.size());
    for (std::size_t n = 0; n < mesh_.size(); ++n)
        out[n] = r(static_cast<Eigen::Index>(refined_index(n)));
    return out;
}

std::shared_ptr<const QuadEvaluator> EvaluatorCache::get(const GradedMesh& mesh, double mu)
{
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& [key, ev] : items_)
        if (key.second == mu && key.first == mesh)
            return ev;
    auto ev = std::make_shared<const QuadEvaluator>(mesh, mu, rule_, refined_);
    items_.push_back({{mesh, mu}, ev});
    return ev;
}

std::vector<double> cross_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const CellwiseLinear& psi,
                                const InnerProductContext& ctx)
{
    return ev.node_integrals(ctx.rowwise(ev.values(phi), ev.frac_values(psi)));
}

std::vector<double> q1_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const InnerProductContext& ctx)
{
    return cross_curve(ev, phi, phi, ctx);
}

std::vector<double> q2_curve(const QuadEvaluator& ev, const CellwiseLinear& phi, const InnerProductContext& ctx)
{
    const Eigen::MatrixXd F = ev.frac_values(phi);
    return ev.node_integrals(ctx.rowwise(F, F));
}

namespace {

double curve_at(const std::vector<double>& c, std::size_t n)
{
    if (n >= c.size())
        throw std::out_of_range("quadratic functional: t_index out of range");
    return c[n];
}

} // namespace

double q1(double mu, const Series& phi, std::size_t t_index, const InnerProductContext& ctx)
{
    if (t_index >= phi.size())
        throw std::out_of_range("q1: t_index out of range");
    const QuadEvaluator ev(phi.mesh(), mu, QuadRule::for_mesh(phi.mesh().N()));
    return curve_at(q1_curve(ev, CellwiseLinear::from_series(phi), ctx), t_index);
}

double q2(double mu, const Series& phi, std::size_t t_index, const InnerProductContext& ctx)
{
    if (t_index >= phi.size())
        throw std::out_of_range("q2: t_index out of range");
    const QuadEvaluator ev(phi.mesh(), mu, QuadRule::for_mesh(phi.mesh().N()));
    return curve_at(q2_curve(ev, CellwiseLinear::from_series(phi), ctx), t_index);
}

Series mj_transform(const Series& phi, int j)
{
    if (j < 0)
        throw std::invalid_argument("mj_transform: j must be >= 0");
    if (phi.first_defined() != 0)
        throw SingularAtOrigin("mj_transform needs a series defined at t = 0");
    if (j == 0)
        return phi;
    if (phi.mesh().N() < 8 * static_cast<std::size_t>(j))
        throw InsufficientSmoothness("mj_transform: need at least " + std::to_string(8 * j) +
                                     " steps for j = " + std::to_string(j));
    const auto a = identities::diff_mult_coeffs(j, j).first;
    const auto& mesh = phi.mesh();
    Eigen::MatrixXd v = static_cast<double>(a.value(j)) * phi.values();
    for (int r = 1; r <= j; ++r) {
        const double c = static_cast<double>(a.value(j - r));
        const Series d = differentiate(phi, r);
        for (std::size_t n = 1; n < mesh.size(); ++n)
            v.col(static_cast<Eigen::Index>(n)) +=
                c * std::pow(mesh[n], r) * d.values().col(static_cast<Eigen::Index>(n));
    }
    return Series(mesh, std::move(v));
}

double q_mj(double mu, int j, const Series& phi, int which, std::size_t t_index, const InnerProductContext& ctx)
{
    const Series x = mj_transform(phi, j);
    if (which == 1)
        return q1(mu, x, t_index, ctx);
    if (which == 2)
        return q2(mu, x, t_index, ctx);
    throw std::invalid_argument("q_mj: which must be 1 or 2");
}

Series b_op(double mu, const Series& psi, const Series& dpsi, const Series& phi)
{
    if (!(mu >= 0 && mu <= 1))
        throw std::invalid_argument("b_op: mu must lie in [0, 1]");
    check_mesh(psi.mesh(), phi.mesh(), "b_op");
    check_mesh(dpsi.mesh(), phi.mesh(), "b_op");
    if (psi.dim() != 1 || dpsi.dim() != 1)
        throw std::invalid_argument("b_op: multiplier must be scalar");
    const Eigen::MatrixXd ip = frac_nodes(mu, phi);
    const Eigen::VectorXd p = psi.values().row(0).transpose();
    const Eigen::VectorXd dp = dpsi.values().row(0).transpose();
    Eigen::MatrixXd first = ip, g = ip;
    for (Eigen::Index n = 0; n < ip.cols(); ++n) {
        first.col(n) *= p(n);
        g.col(n) *= dp(n);
    }
    return Series(phi.mesh(), first - FracWeights(phi.mesh(), 1.0).apply(g));
}

Series b_op_direct(double mu, const Series& psi, const Series& phi)
{
    if (!(mu > 0 && mu <= 1))
        throw std::invalid_argument("b_op_direct: mu must lie in (0, 1]");
    check_mesh(psi.mesh(), phi.mesh(), "b_op_direct");
    const double scale = phi.values().cwiseAbs().maxCoeff();
    if (phi.values().col(0).cwiseAbs().maxCoeff() > 1e-14 * std::max(scale, 1e-300))
        throw HypothesisViolation("initial-value", "the un-integrated memory form needs phi(0) = 0");
    Eigen::MatrixXd d;
    if (mu == 1) {
        d = phi.values();
    } else {
        d = rl_derivative(mu, phi).values();
        d.col(0).setZero();
    }
    for (Eigen::Index n = 0; n < d.cols(); ++n)
        d.col(n) *= psi.values()(0, n);
    return Series(phi.mesh(), FracWeights(phi.mesh(), 1.0).apply(d));
}

Series b_op_mj(double mu, int j, const Series& psi, const Series& dpsi, const Series& phi)
{
    return mj_transform(b_op(mu, psi, dpsi, phi), j);
}

// ---------------------------------------------------------------------------------------------
// Inequality checks

namespace {

constexpr double rel_tol = 1e-8;

const Series& need(const std::optional<Series>& s, const char* what)
{
    if (!s)
        throw std::invalid_argument(std::string("inequality check: missing input '") + what + "'");
    return *s;
}

double norm_at(const Series& s, std::size_t n, const InnerProductContext& ctx)
{
    return ctx.norm(s.values().col(static_cast<Eigen::Index>(n)));
}

struct Ctx {
    EvaluatorCache& cache;
    const GradedMesh& mesh;
    std::size_t n;

    double cross(double mu, const CellwiseLinear& a, const CellwiseLinear& b, const InnerProductContext& c) const
    {
        return cross_curve(*cache.get(mesh, mu), a, b, c)[n];
    }
    double q1(double mu, const CellwiseLinear& a, const InnerProductContext& c) const { return cross(mu, a, a, c); }
    double q2(double mu, const CellwiseLinear& a, const InnerProductContext& c) const
    {
        return q2_curve(*cache.get(mesh, mu), a, c)[n];
    }
};

void require_alpha(double alpha, bool allow_one)
{
    if (!(alpha > 0) || alpha > 1 || (!allow_one && alpha == 1))
        throw HypothesisViolation("alpha-range", "alpha = " + std::to_string(alpha) + " outside the admissible range");
}

IneqReport bound(const std::string& id, double lhs, double rhs, double extra_tol = 0)
{
    IneqReport r;
    r.id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tol = rel_tol * (std::fabs(lhs) + std::fabs(rhs)) + extra_tol;
    return r;
}

IneqReport ratio_report(const std::string& id, double lhs, double rhs)
{
    IneqReport r;
    r.id = id;
    r.lhs = lhs;
    r.rhs = rhs;
    r.margin = rhs - lhs;
    r.tol = 0;
    r.ratio_only = true;
    return r;
}

void check_vanishing_moments(const Series& phi, int m)
{
    // (d^q M^k phi)(0) = 0 for 1 <= q <= k-1, 1 <= k <= m+1.
    for (int k = 2; k <= m + 1; ++k) {
        Eigen::MatrixXd v = phi.values();
        for (Eigen::Index n = 0; n < v.cols(); ++n)
            v.col(n) *= std::pow(phi.mesh()[static_cast<std::size_t>(n)], k);
        const Series mk(phi.mesh(), std::move(v));
        for (int q = 1; q <= k - 1; ++q) {
            const Series d = differentiate(mk, q, true);
            const double at0 = d.values().col(0).cwiseAbs().maxCoeff();
            const double scale = d.values().cwiseAbs().maxCoeff();
            if (at0 > 1e-3 * scale + 1e-300)
                throw HypothesisViolation("initial-values", "derivative " + std::to_string(q) + " of t^" +
                                                                std::to_string(k) + " phi does not vanish at 0");
        }
    }
}

} // namespace

IneqReport check_inequality(const std::string& id, const InequalityParams& p, const InequalityInputs& in)
{
    EvaluatorCache cache({}, true);
    return check_inequality(cache, id, p, in);
}

IneqReport check_inequality(EvaluatorCache& cache, const std::string& id, const InequalityParams& p,
                            const InequalityInputs& in)
{
    const Series& phi = need(in.phi, "phi");
    const GradedMesh& mesh = phi.mesh();
    const std::size_t n = p.t_index.value_or(mesh.N());
    if (n == 0 || n > mesh.N())
        throw std::out_of_range("inequality check: t_index must lie in [1, N]");
    const double t = mesh[n];
    const double a = p.alpha;
    const Ctx c{cache, mesh, n};
    const auto& ctx = in.ctx;
    IneqReport r;

    if (id == "2.2-A") {
        require_alpha(a, false);
        if (!(p.epsilon > 0))
            throw HypothesisViolation("epsilon-range", "epsilon must be positive");
        const Series& psi = need(in.psi, "psi");
        check_mesh(mesh, psi.mesh(), "2.2-A");
        const auto F = CellwiseLinear::from_series(phi), G = CellwiseLinear::from_series(psi);
        const double lhs = std::fabs(c.cross(a, F, G, ctx));
        const double rhs = c.q1(a, F, ctx) / (4 * p.epsilon * (1 - a) * (1 - a)) + p.epsilon * c.q1(a, G, ctx);
        r = bound(id, lhs, rhs);
    } else if (id == "2.2-B") {
        require_alpha(a, false);
        const auto F = CellwiseLinear::from_series(phi);
        r = bound(id, c.q2(a, F, ctx), 2 * std::pow(t, a) / (1 - a) * c.q1(a, F, ctx));
    } else if (id == "2.2-C") {
        require_alpha(a, false);
        const auto F = CellwiseLinear::from_series(phi);
        r = bound(id, c.q1(a, F, ctx), 2 * std::pow(t, a) * c.q1(0, F, ctx));
    } else if (id == "2.3-i") {
        require_alpha(a, true);
        const auto F = CellwiseLinear::from_series(phi);
        const auto ev = cache.get(mesh, a);
        const Eigen::VectorXd g = ctx.rowwise(ev->values(F), ev->frac_values(F));
        const Eigen::VectorXd run = ev->running_integral(g);
        const auto& R = ev->refined();
        std::vector<double> fine(run.data(), run.data() + run.size());
        std::vector<double> coarse = ev->node_integrals(g);
        const double rf = frac_at(R, fine, a, t), rc = frac_at(mesh, coarse, a, t);
        r = bound(id, c.q2(a, F, ctx), 2 * rf, 2 * std::fabs(rf - rc));
    } else if (id == "2.3-ii") {
        require_alpha(a, true);
        const auto F = CellwiseLinear::from_series(phi);
        const auto ev = cache.get(mesh, a);
        const Eigen::MatrixXd V = ev->frac_at_refined(F);
        std::vector<double> fine(static_cast<std::size_t>(V.cols()));
        for (Eigen::Index i = 0; i < V.cols(); ++i)
            fine[static_cast<std::size_t>(i)] = ctx.inner(V.col(i), V.col(i));
        std::vector<double> coarse(mesh.size());
        for (std::size_t k = 0; k < mesh.size(); ++k)
            coarse[k] = fine[ev->refined_index(k)];
        const double lf = frac_at(ev->refined(), fine, 1 - a, t), lc = frac_at(mesh, coarse, 1 - a, t);
        r = bound(id, lf, 2 * c.q1(a, F, ctx), std::fabs(lf - lc));
    } else if (id == "2.3-iii") {
        require_alpha(a, true);
        const double scale = phi.values().cwiseAbs().maxCoeff();
        if (phi.values().col(0).cwiseAbs().maxCoeff() > 1e-14 * std::max(scale, 1e-300))
            throw HypothesisViolation("initial-value", "2.3-iii needs phi(0) = 0");
        const auto D = CellwiseLinear::derivative_of(phi);
        const double nrm = norm_at(phi, n, ctx);
        r = bound(id, nrm * nrm, 2 * omega(2 - a, t) * c.q1(a, D, ctx));
    } else if (id == "2.4") {
        if (!(p.mu >= 0 && p.mu <= p.nu && p.nu <= 1))
            throw HypothesisViolation("mu-nu-range", "need 0 <= mu <= nu <= 1");
        const auto F = CellwiseLinear::from_series(phi);
        r = bound(id, c.q2(p.nu, F, ctx), 2 * std::pow(t, 2 * (p.nu - p.mu)) * c.q2(p.mu, F, ctx));
    } else if (id == "3.1-first" || id == "3.1-second") {
        require_alpha(a, false);
        if (p.m < 1)
            throw HypothesisViolation("m-range", "the stability bound needs m >= 1");
        if (!in.grad_ctx)
            throw std::invalid_argument("inequality check: missing gradient inner product");
        const Series& f = need(in.f, "f");
        check_mesh(mesh, f.mesh(), id.c_str());
        const auto U = CellwiseLinear::from_series(mj_transform(phi, p.m));
        double data = 0;
        for (int j = 0; j <= p.m; ++j)
            data += c.q1(0, CellwiseLinear::from_series(mj_transform(f, j)), ctx);
        if (id == "3.1-first")
            r = ratio_report(id, c.q1(a, U, ctx) + c.q2(a, U, *in.grad_ctx), std::pow(t, a) * data);
        else
            r = ratio_report(id, c.q1(0, U, ctx) + c.q1(a, U, *in.grad_ctx), data);
    } else if (id == "A.2") {
        if (!(p.mu >= 0 && p.mu <= 1))
            throw HypothesisViolation("mu-range", "memory operator needs 0 <= mu <= 1");
        if (p.m < 1)
            throw HypothesisViolation("m-range", "A.2 needs m >= 1");
        if (!in.multiplier || !in.multiplier_dt)
            throw std::invalid_argument("inequality check: missing multiplier");
        const double scale = phi.values().cwiseAbs().maxCoeff();
        if (phi.values().col(0).cwiseAbs().maxCoeff() > 1e-14 * std::max(scale, 1e-300))
            throw HypothesisViolation("initial-value", "A.2 is tested on functions with phi(0) = 0");
        const Series psi(mesh, sample(mesh, in.multiplier).transpose());
        const Series dpsi(mesh, sample(mesh, in.multiplier_dt).transpose());
        const Series B = b_op(p.mu, psi, dpsi, phi);
        const double lhs = c.q1(0, CellwiseLinear::from_series(mj_transform(B, p.m)), ctx);
        double rhs = 0;
        for (int j = 0; j <= p.m; ++j)
            rhs += c.q2(p.mu, CellwiseLinear::from_series(mj_transform(phi, j)), ctx);
        r = ratio_report(id, lhs, rhs);
    } else if (id == "A.3") {
        if (!(p.mu >= 0))
            throw HypothesisViolation("mu-range", "A.3 needs mu >= 0");
        if (p.m < 0)
            throw HypothesisViolation("m-range", "A.3 needs m >= 0");
        if (!in.multiplier)
            throw std::invalid_argument("inequality check: missing multiplier");
        check_vanishing_moments(phi, p.m);
        const Series prod = scale_columns(phi, sample(mesh, in.multiplier));
        const Series J(mesh, frac_nodes(p.mu, prod));
        const Series D = differentiate(J, p.m);
        const double lhs = std::pow(t, p.m + 1) * norm_at(D, n, ctx);
        std::vector<Series> derivs;
        for (int j = 0; j <= p.m; ++j)
            derivs.push_back(differentiate(phi, j));
        double rhs = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            double s = 0;
            for (int j = 0; j <= p.m; ++j)
                s += std::pow(mesh[k], p.mu + 1 + j) * norm_at(derivs[static_cast<std::size_t>(j)], k, ctx);
            rhs = std::max(rhs, s);
        }
        r = ratio_report(id, lhs, rhs);
    } else {
        throw std::invalid_argument("unknown inequality '" + id + "'");
    }
    r.params = {{"alpha", a}, {"epsilon", p.epsilon}, {"mu", p.mu}, {"nu", p.nu}, {"m", p.m}, {"t", t}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// Gronwall

GronwallReport gronwall_bound(const TimeFn& a_fn, const TimeFn& b_fn, double beta, const Series& q)
{
    if (!(beta > 0))
        throw std::invalid_argument("gronwall_bound: beta must be positive");
    if (q.dim() != 1 || q.first_defined() != 0)
        throw std::invalid_argument("gronwall_bound: q must be a scalar series defined at t = 0");
    const GradedMesh& mesh = q.mesh();
    const std::size_t S = mesh.size();
    const Eigen::VectorXd a = sample(mesh, a_fn), b = sample(mesh, b_fn);
    for (std::size_t n = 0; n < S; ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        if (a(i) < 0 || b(i) < 0)
            throw HypothesisViolation("gronwall-coefficients", "a and b must be non-negative");
        if (n > 0 && (a(i) < a(i - 1) * (1 - 1e-14) || b(i) < b(i - 1) * (1 - 1e-14)))
            throw HypothesisViolation("gronwall-coefficients", "a and b must be non-decreasing");
    }
    const Eigen::VectorXd qv = q.values().row(0).transpose();
    const Eigen::VectorXd iq = FracWeights(mesh, beta).apply(q.values()).row(0).transpose();

    // Product-integration error estimate from the mesh of every other node.
    Eigen::VectorXd err = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(S));
    if (mesh.N() >= 4) {
        std::vector<std::size_t> idx;
        for (std::size_t n = 0; n < S; n += 2)
            idx.push_back(n);
        if (idx.back() != S - 1)
            idx.push_back(S - 1);
        std::vector<double> nodes;
        Eigen::MatrixXd cv(1, static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            nodes.push_back(mesh[idx[i]]);
            cv(0, static_cast<Eigen::Index>(i)) = qv(static_cast<Eigen::Index>(idx[i]));
        }
        const GradedMesh coarse(nodes);
        const Eigen::MatrixXd ic = FracWeights(coarse, beta).apply(cv);
        for (std::size_t i = 0; i < idx.size(); ++i)
            err(static_cast<Eigen::Index>(idx[i])) =
                std::fabs(ic(0, static_cast<Eigen::Index>(i)) - iq(static_cast<Eigen::Index>(idx[i])));
        for (std::size_t i = 0; i + 1 < idx.size(); ++i)
            for (std::size_t n = idx[i] + 1; n < idx[i + 1]; ++n)
                err(static_cast<Eigen::Index>(n)) =
                    std::max(err(static_cast<Eigen::Index>(idx[i])), err(static_cast<Eigen::Index>(idx[i + 1])));
    }

    const double scale = qv.cwiseAbs().maxCoeff() + a.cwiseAbs().maxCoeff();
    const MittagLeffler ml(beta, 1.0);
    GronwallReport rep{Series(mesh, Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(S)))};
    Eigen::MatrixXd bound(1, static_cast<Eigen::Index>(S));
    bool premise = true;
    double defect = -std::numeric_limits<double>::infinity();
    double excess = -std::numeric_limits<double>::infinity();
    bool violated = false;
    for (std::size_t n = 0; n < S; ++n) {
        const auto i = static_cast<Eigen::Index>(n);
        const double tol = rel_tol * scale + b(i) * err(i);
        const double d = qv(i) - a(i) - b(i) * iq(i);
        defect = std::max(defect, d);
        if (qv(i) < -tol || d > tol)
            premise = false;
        const double e = ml(b(i) * std::pow(mesh[n], beta));
        bound(0, i) = a(i) * e;
        const double x = qv(i) - bound(0, i);
        excess = std::max(excess, x);
        if (x > rel_tol * scale + b(i) * err(i) * e)
            violated = true;
    }
    rep.bound = Series(mesh, std::move(bound));
    rep.premise_holds = premise;
    rep.violated = premise && violated;
    rep.max_excess = excess;
    rep.premise_defect = defect;
    return rep;
}

// ---------------------------------------------------------------------------------------------
// Randomized suites

Series random_series(std::mt19937_64& rng, const GradedMesh& mesh, bool start_at_zero)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    const bool walk = (rng() & 1u) != 0;
    std::vector<double> v(mesh.size());
    double acc = 0;
    const double step = 1.0 / std::sqrt(static_cast<double>(mesh.N()));
    for (auto& x : v) {
        if (walk) {
            acc += step * normal(rng);
            x = acc;
        } else {
            x = normal(rng);
        }
    }
    if (start_at_zero) {
        const double v0 = v[0];
        for (auto& x : v)
            x -= v0;
    }
    return Series::scalar(mesh, v);
}

std::vector<IneqReport> positivity_suite(std::uint64_t seed, int count, const std::vector<double>& mus, std::size_t N)
{
    const GradedMesh mesh(1.0, N, 1.0);
    EvaluatorCache cache(QuadRule::for_mesh(N));
    std::mt19937_64 rng(seed);
    const InnerProductContext ctx;
    std::vector<IneqReport> out;
    for (int i = 0; i < count; ++i) {
        const auto F = CellwiseLinear::from_series(random_series(rng, mesh));
        const double q0 = q1_curve(*cache.get(mesh, 0.0), F, ctx).back();
        for (double mu : mus) {
            if (!(mu >= 0 && mu <= 1))
                throw std::invalid_argument("positivity_suite: mu must lie in [0, 1]");
            IneqReport r;
            r.id = "positivity";
            r.lhs = 0;
            r.rhs = q1_curve(*cache.get(mesh, mu), F, ctx).back();
            r.margin = r.rhs;
            r.tol = 1e-10 * q0;
            r.params = {{"mu", mu}, {"sample", i}, {"t", mesh.T()}};
            out.push_back(r);
        }
    }
    return out;
}

std::vector<IneqReport> lemma_suite(const std::string& lemma, const LemmaSuiteConfig& cfg)
{
    if (lemma != "2.2" && lemma != "2.3" && lemma != "2.4")
        throw std::invalid_argument("lemma_suite: lemma must be 2.2, 2.3 or 2.4");
    const GradedMesh mesh(1.0, cfg.N, 1.0);
    EvaluatorCache cache(QuadRule::for_mesh(cfg.N), lemma == "2.3");
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick_t(cfg.N / 2, cfg.N);
    std::vector<IneqReport> out;
    auto add = [&](const std::string& id, const InequalityParams& p, const InequalityInputs& in, int sample) {
        IneqReport r = check_inequality(cache, id, p, in);
        r.params["sample"] = sample;
        out.push_back(std::move(r));
    };
    for (int i = 0; i < cfg.count; ++i) {
        InequalityInputs in;
        in.phi = random_series(rng, mesh, lemma == "2.3");
        in.psi = random_series(rng, mesh);
        InequalityParams p;
        p.t_index = pick_t(rng);
        if (lemma == "2.2") {
            for (double a : cfg.alphas) {
                p.alpha = a;
                for (double e : cfg.epsilons) {
                    p.epsilon = e;
                    add("2.2-A", p, in, i);
                }
                add("2.2-B", p, in, i);
                add("2.2-C", p, in, i);
            }
        } else if (lemma == "2.3") {
            InequalityInputs free = in;
            free.phi = in.psi;
            for (double a : cfg.alphas) {
                p.alpha = a;
                add("2.3-i", p, free, i);
                add("2.3-ii", p, free, i);
                add("2.3-iii", p, in, i);
            }
        } else {
            std::vector<double> grid{0.0};
            grid.insert(grid.end(), cfg.alphas.begin(), cfg.alphas.end());
            grid.push_back(1.0);
            for (double mu : grid)
                for (double nu : grid) {
                    if (nu < mu)
                        continue;
                    p.mu = mu;
                    p.nu = nu;
                    add("2.4", p, in, i);
                }
        }
    }
    return out;
}

std::vector<GronwallReport> gronwall_suite(std::uint64_t seed, int count, std::size_t N)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<GronwallReport> out;
    for (int i = 0; i < count; ++i) {
        const double a0 = 0.5 + 1.5 * u01(rng), a1 = 2.0 * u01(rng);
        const double bc = 0.5 + 1.5 * u01(rng), beta = 0.3 + 0.6 * u01(rng);
        const GradedMesh mesh(1.0, N, std::min(1.0 / beta, 3.0));
        const FracWeights W(mesh, beta);
        Eigen::MatrixXd av(1, static_cast<Eigen::Index>(mesh.size()));
        for (std::size_t n = 0; n < mesh.size(); ++n)
            av(0, static_cast<Eigen::Index>(n)) = a0 + a1 * mesh[n];
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(1, av.cols());
        for (int it = 0; it < 20; ++it)
            q = av + bc * W.apply(q);
        out.push_back(gronwall_bound([=](double t) { return a0 + a1 * t; }, [=](double) { return bc; }, beta,
                                     Series(mesh, q)));
    }
    return out;
}

} // namespace fracreg::quad
