#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include <quadmath.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fracreg {

namespace {

constexpr std::size_t table_size = 64;
// Largest series term we accept for alternating sums: cancellation in quad precision then
// still leaves about 1e-16 absolute accuracy.
constexpr double max_log_term_alternating = 41.4; // log(1e18)
constexpr double max_log_term_positive = 700.0;
constexpr double asymptotic_reach = 40.0;

__float128 rgamma_q(__float128 x)
{
    if (x <= 0 && floorq(x) == x)
        return 0;
    __float128 g = tgammaq(x);
    if (isinfq(g))
        return 0;
    return 1 / g;
}

double rgamma_d(double x)
{
    if (x <= 0 && std::floor(x) == x)
        return 0.0;
    double g = std::tgamma(x);
    if (std::isinf(g))
        return 0.0;
    return 1.0 / g;
}

std::string describe(double beta, double b, double z)
{
    std::ostringstream os;
    os.precision(17);
    os << "E_{" << beta << "," << b << "}(" << z << ")";
    return os.str();
}

} // namespace

MittagLeffler::MittagLeffler(double beta, double b)
    : beta_(beta), b_(b)
{
    if (!(beta > 0) || !std::isfinite(beta) || !std::isfinite(b))
        throw std::invalid_argument("mittag_leffler: beta must be positive and parameters finite");
    rgamma_.resize(table_size);
    for (std::size_t k = 0; k < table_size; ++k)
        rgamma_[k] = rgamma_q((__float128)beta_ * k + (__float128)b_);
}

__float128 MittagLeffler::rgamma_coeff(std::size_t k) const
{
    if (k < rgamma_.size())
        return rgamma_[k];
    return rgamma_q((__float128)beta_ * k + (__float128)b_);
}

bool MittagLeffler::series_feasible(double z) const
{
    if (z == 0)
        return true;
    const double lz = std::log(std::fabs(z));
    const double limit = z > 0 ? max_log_term_positive : max_log_term_alternating;
    double prev = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < 1000000; ++k) {
        const double x = beta_ * static_cast<double>(k) + b_;
        if (x <= 0 && std::floor(x) == x)
            continue;
        const double lt = static_cast<double>(k) * lz - std::lgamma(x);
        if (lt > limit)
            return false;
        if (x > 2 && lt < prev && lt < -80)
            return true;
        prev = lt;
    }
    return false;
}

double MittagLeffler::by_series(double z) const
{
    if (!series_feasible(z))
        throw EvaluationFailure("power series not usable for " + describe(beta_, b_, z));
    if (z == 0)
        return static_cast<double>(rgamma_coeff(0));
    const __float128 zq = z;
    __float128 sum = 0, zk = 1;
    bool past_peak = false;
    __float128 prev_abs = 0;
    for (std::size_t k = 0; k < 2000000; ++k) {
        const __float128 term = zk * rgamma_coeff(k);
        sum += term;
        const __float128 at = fabsq(term);
        const double x = beta_ * static_cast<double>(k) + b_;
        if (x > 2 && at < prev_abs)
            past_peak = true;
        if (past_peak && at <= 1e-36Q * fabsq(sum))
            break;
        if (past_peak && sum == 0 && at < 1e-300Q)
            break;
        prev_abs = at;
        zk *= zq;
    }
    const double v = static_cast<double>(sum);
    if (!std::isfinite(v))
        throw EvaluationFailure("power series overflow for " + describe(beta_, b_, z));
    return v;
}

bool MittagLeffler::asymptotic_accurate(double z) const
{
    if (!(z < 0) || beta_ >= 1)
        return false;
    if (std::pow(-z, 1.0 / beta_) < asymptotic_reach)
        return false;
    try {
        by_asymptotic(z);
        return true;
    } catch (const EvaluationFailure&) {
        return false;
    }
}

// -sum_{k>=1} z^{-k}/Gamma(b - beta k), truncated at the smallest term.  For 0 < beta < 1 and
// negative z there are no exponential contributions.
double MittagLeffler::by_asymptotic(double z) const
{
    if (!(z < 0) || beta_ >= 1)
        throw EvaluationFailure("asymptotic expansion only for negative z and beta < 1: " + describe(beta_, b_, z));
    const double iz = 1.0 / z;
    double sum = 0.0, zk = 1.0;
    double last_nonzero = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 400; ++k) {
        zk *= iz;
        const double r = rgamma_d(b_ - beta_ * k);
        const double term = -zk * r;
        if (r == 0.0)
            continue;
        const double at = std::fabs(term);
        if (at > last_nonzero)
            break;
        sum += term;
        last_nonzero = at;
        if (at <= 1e-17 * std::fabs(sum))
            return sum;
    }
    throw EvaluationFailure("asymptotic expansion did not reach working accuracy for " + describe(beta_, b_, z));
}

// Real-line integral representation (valid for negative z, 0 < beta < 1, b < 1 + beta);
// larger b is brought into range by E_{beta,b}(z) = (E_{beta,b-beta}(z) - 1/Gamma(b-beta))/z.
double MittagLeffler::by_integral(double z) const
{
    if (!(z < 0) || beta_ >= 1)
        throw EvaluationFailure("integral representation only for negative z and beta < 1: " + describe(beta_, b_, z));
    if (b_ >= 1.0 + beta_) {
        const MittagLeffler lower(beta_, b_ - beta_);
        return (lower.by_integral(z) - rgamma_d(b_ - beta_)) / z;
    }
    const double pi = boost::math::constants::pi<double>();
    const double beta = beta_, b = b_;
    const double s1 = std::sin(pi * (1.0 - b));
    const double s2 = std::sin(pi * (1.0 + beta - b));
    const double cb = std::cos(pi * beta);
    auto f = [=](double s) {
        if (s <= 0)
            return 0.0;
        const double sb = std::pow(s, beta);
        const double num = sb * s1 - z * s2;
        const double den = sb * sb - 2.0 * sb * z * cb + z * z;
        return std::exp(-s) * std::pow(s, beta - b) * num / den;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0, l1 = 0;
    const double v = integrator.integrate(f, 1e-13, &err, &l1) / pi;
    if (!std::isfinite(v) || err > 1e-10 * std::max(1.0, l1))
        throw EvaluationFailure("integral representation did not converge for " + describe(beta_, b_, z));
    return v;
}

MittagLeffler::Route MittagLeffler::route(double z) const
{
    if (beta_ >= 1 || z >= 0)
        return Route::series;
    if (-z <= z_switch && series_feasible(z))
        return Route::series;
    if (asymptotic_accurate(z))
        return Route::asymptotic;
    return Route::integral;
}

double MittagLeffler::operator()(double z) const
{
    if (!std::isfinite(z))
        throw std::invalid_argument("mittag_leffler: non-finite argument");
    const Route r = route(z);
    double v = 0;
    switch (r) {
    case Route::series: v = by_series(z); break;
    case Route::asymptotic: v = by_asymptotic(z); break;
    case Route::integral: v = by_integral(z); break;
    }
    const double az = -z;
    if (beta_ < 1 && az >= band_lo && az <= band_hi) {
        double alt;
        if (r == Route::series)
            alt = asymptotic_accurate(z) ? by_asymptotic(z) : by_integral(z);
        else if (series_feasible(z))
            alt = by_series(z);
        else if (r == Route::asymptotic)
            alt = by_integral(z);
        else
            return v;
        if (std::fabs(alt - v) > band_tol * std::max(std::fabs(v), 1e-4))
            throw EvaluationFailure("evaluation paths disagree for " + describe(beta_, b_, z));
    }
    return v;
}

double mittag_leffler(double beta, double b, double z)
{
    return MittagLeffler(beta, b)(z);
}

} // namespace fracreg
