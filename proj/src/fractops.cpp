#include "fracreg/fractops.hpp"
#include "fracreg/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fracreg {

namespace {

bool nonpositive_integer(double mu)
{
    return mu <= 0 && std::floor(mu) == mu;
}

// Closed form suffers cancellation once the cell sits far from the target; switch to
// Gauss-Legendre, where the kernel is smooth across the cell.
constexpr double far_ratio = 2.0;

struct KernelConsts {
    double mu;
    double rg_mu;    // 1/Gamma(mu)
    double rg_mu2;   // 1/Gamma(mu+2)
};

KernelConsts kernel_consts(double mu)
{
    return {mu, 1.0 / std::tgamma(mu), 1.0 / std::tgamma(mu + 2.0)};
}

void interval_weights_impl(const KernelConsts& c, double s, double tk, double tk1, double& wl, double& wr)
{
    const double mu = c.mu;
    const double tau = tk1 - tk;
    const double a = std::max(0.0, s - tk1);
    const double b = s - tk;
    if (a < far_ratio * tau) {
        const double bm = std::pow(b, mu), am = a > 0 ? std::pow(a, mu) : 0.0;
        const double bm1 = bm * b, am1 = am * a;
        const double d1 = bm1 - am1, d0 = bm - am;
        wl = (mu * d1 - (mu + 1.0) * a * d0) * c.rg_mu2 / tau;
        wr = ((mu + 1.0) * b * d0 - mu * d1) * c.rg_mu2 / tau;
        return;
    }
    using gl = boost::math::quadrature::gauss<double, 8>;
    const auto& xs = gl::abscissa();
    const auto& ws = gl::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * tau;
    wl = wr = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        for (int sgn : {-1, 1}) {
            if (xs[i] == 0 && sgn > 0)
                continue;
            const double x = mid + sgn * half * xs[i];
            const double k = ws[i] * std::pow(x, mu - 1.0);
            wl += k * (x - a);
            wr += k * (b - x);
        }
    }
    wl *= c.rg_mu * half / tau;
    wr *= c.rg_mu * half / tau;
}

} // namespace

double omega(double mu, double t)
{
    if (!std::isfinite(mu) || !std::isfinite(t))
        throw std::invalid_argument("omega: non-finite input");
    if (!(t > 0))
        throw std::invalid_argument("omega: t must be positive");
    if (nonpositive_integer(mu))
        return 0.0;
    if (mu == 1.0)
        return 1.0;
    return std::pow(t, mu - 1.0) / std::tgamma(mu);
}

void interval_weights(double mu, double s, double tk, double tk1, double& wl, double& wr)
{
    if (!(mu > 0))
        throw std::invalid_argument("interval_weights: mu must be positive");
    if (!(tk1 > tk) || s < tk1)
        throw std::invalid_argument("interval_weights: cell must lie below the target");
    interval_weights_impl(kernel_consts(mu), s, tk, tk1, wl, wr);
}

void cell_weights_at(const GradedMesh& mesh, double mu, double s, std::vector<double>& left,
                     std::vector<double>& right)
{
    if (!(mu > 0))
        throw std::invalid_argument("cell_weights_at: mu must be positive");
    const std::size_t cells = mesh.N();
    left.assign(cells, 0.0);
    right.assign(cells, 0.0);
    if (!(s > 0))
        return;
    const KernelConsts c = kernel_consts(mu);
    const double rg1 = 1.0 / std::tgamma(mu + 1.0);
    for (std::size_t k = 0; k < cells; ++k) {
        const double tk = mesh[k], tk1 = mesh[k + 1];
        if (tk >= s)
            break;
        if (tk1 <= s) {
            interval_weights_impl(c, s, tk, tk1, left[k], right[k]);
        } else {
            const double d = s - tk, tau = tk1 - tk;
            const double w1 = std::pow(d, mu) * rg1;
            const double w2 = w1 * d / (mu + 1.0);
            left[k] = w1 - w2 / tau;
            right[k] = w2 / tau;
        }
    }
}

FracWeights::FracWeights(const GradedMesh& mesh, double mu)
    : mesh_(mesh), mu_(mu)
{
    if (!(mu > 0) || !std::isfinite(mu))
        throw std::invalid_argument("frac_integral: mu must be positive (use rl_derivative to differentiate)");
    const std::size_t n_nodes = mesh.size();
    offset_.resize(n_nodes + 1);
    offset_[0] = 0;
    for (std::size_t n = 0; n < n_nodes; ++n)
        offset_[n + 1] = offset_[n] + (n == 0 ? 0 : n + 1);
    packed_.assign(offset_[n_nodes], 0.0);
    const KernelConsts c = kernel_consts(mu);
    for (std::size_t n = 1; n < n_nodes; ++n) {
        double* w = packed_.data() + offset_[n];
        const double s = mesh[n];
        for (std::size_t k = 0; k < n; ++k) {
            double wl, wr;
            interval_weights_impl(c, s, mesh[k], mesh[k + 1], wl, wr);
            w[k] += wl;
            w[k + 1] += wr;
        }
    }
}

std::span<const double> FracWeights::row(std::size_t n) const
{
    if (n + 1 >= offset_.size())
        throw std::out_of_range("FracWeights: row out of range");
    return {packed_.data() + offset_[n], offset_[n + 1] - offset_[n]};
}

Eigen::MatrixXd FracWeights::apply(const Eigen::MatrixXd& values) const
{
    if (static_cast<std::size_t>(values.cols()) != mesh_.size())
        throw std::invalid_argument("FracWeights: value count does not match mesh");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(values.rows(), values.cols());
    for (std::size_t n = 1; n < mesh_.size(); ++n) {
        auto w = row(n);
        Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
        out.col(static_cast<Eigen::Index>(n)).noalias() = values.leftCols(wv.size()) * wv;
    }
    return out;
}

Series FracWeights::apply(const Series& s) const
{
    if (!(s.mesh() == mesh_))
        throw std::invalid_argument("FracWeights: series lives on a different mesh");
    if (s.first_defined() != 0)
        throw SingularAtOrigin("cannot integrate a series that is undefined at t = 0");
    return Series(mesh_, apply(s.values()));
}

Series frac_integral(double mu, const Series& s)
{
    return FracWeights(s.mesh(), mu).apply(s);
}

Series rl_derivative(double alpha, const Series& s)
{
    if (!(alpha > 0 && alpha < 1))
        throw std::invalid_argument("rl_derivative: alpha must lie in (0, 1)");
    if (s.mesh().N() < 2)
        throw std::invalid_argument("rl_derivative: need N >= 2");
    return differentiate(frac_integral(alpha, s), 1);
}

Series fi_omega_shift(int m, double mu, const Series& phi, std::span<const double> initial_derivatives)
{
    if (m < 1)
        throw std::invalid_argument("fi_omega_shift: m must be >= 1");
    if (!(mu >= 0))
        throw std::invalid_argument("fi_omega_shift: mu must be >= 0");
    if (initial_derivatives.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("fi_omega_shift: expected " + std::to_string(m) +
                                    " initial derivatives, got " +
                                    std::to_string(initial_derivatives.size()));
    if (phi.dim() != 1)
        throw std::invalid_argument("fi_omega_shift: scalar series expected");
    Series d = differentiate(phi, m, true);
    Eigen::MatrixXd v = mu > 0 ? frac_integral(mu, d).values() : d.values();
    const auto& mesh = phi.mesh();
    for (std::size_t n = 1; n < mesh.size(); ++n)
        for (int j = 0; j < m; ++j)
            v(0, static_cast<Eigen::Index>(n)) += initial_derivatives[static_cast<std::size_t>(j)] * omega(mu - m + 1 + j, mesh[n]);
    v(0, 0) = std::numeric_limits<double>::quiet_NaN();
    return Series(mesh, std::move(v), 1);
}

} // namespace fracreg
