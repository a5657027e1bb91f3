#include "fracreg/identities.hpp"
#include "fracreg/errors.hpp"
#include "fracreg/fractops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracreg::identities {

// ---------------------------------------------------------------------------------------------
// Poly

void Poly::trim()
{
    while (!coeffs_.empty() && coeffs_.back() == Rational(0))
        coeffs_.pop_back();
}

Rational Poly::operator()(Rational x) const
{
    Rational r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        r = r * x + *it;
    return r;
}

long double Poly::operator()(long double x) const
{
    long double r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        r = r * x + static_cast<long double>(it->numerator()) / static_cast<long double>(it->denominator());
    return r;
}

Poly operator+(const Poly& a, const Poly& b)
{
    std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i)
        c[i] += b.coeffs_[i];
    return Poly(std::move(c));
}

Poly operator-(const Poly& a, const Poly& b)
{
    return a + b * Poly(Rational(-1));
}

Poly operator*(const Poly& a, const Poly& b)
{
    if (a.is_zero() || b.is_zero())
        return Poly();
    std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
            c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(c));
}

std::string Poly::str() const
{
    if (coeffs_.empty())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i] == Rational(0))
            continue;
        if (!first)
            os << " + ";
        os << coeffs_[i];
        if (i == 1)
            os << "*mu";
        else if (i > 1)
            os << "*mu^" << i;
        first = false;
    }
    return os.str();
}

// ---------------------------------------------------------------------------------------------
// Tables

const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::a: return "a";
    case Kind::b: return "b";
    case Kind::c: return "c";
    case Kind::d: return "d";
    }
    return "?";
}

const Poly& CommutatorTable::at(int j) const
{
    if (j < 0 || j >= static_cast<int>(coeffs.size()))
        throw std::out_of_range("commutator table index out of range");
    return coeffs[static_cast<std::size_t>(j)];
}

Poly CommutatorTable::tilde(int j) const
{
    const int top = (kind == Kind::a || kind == Kind::b) ? q : m;
    const int i = top - j;
    if (i < 0 || i >= static_cast<int>(coeffs.size()))
        return Poly();
    return coeffs[static_cast<std::size_t>(i)];
}

long double CommutatorTable::value(int j, long double mu) const
{
    return at(j)(mu);
}

long double CommutatorTable::tilde_value(int j, long double mu) const
{
    return tilde(j)(mu);
}

namespace {

// One multiplication by t pushed through the existing expansion.
// a: D^k M = M D^k + k D^(k-1);  b: M D^k = D^k M - k D^(k-1);
// c: I^(mu+k) M = M I^(mu+k) - (mu+k) I^(mu+k+1);  d: M I^(mu+k) = I^(mu+k) M + (mu+k) I^(mu+k+1).
std::vector<Poly> step_up(Kind kind, const std::vector<Poly>& prev, int q, std::size_t len)
{
    std::vector<Poly> next(len);
    for (std::size_t j = 0; j < len; ++j) {
        Poly v = j < prev.size() ? prev[j] : Poly();
        if (j >= 1 && j - 1 < prev.size()) {
            const Poly& p = prev[j - 1];
            const int jj = static_cast<int>(j);
            switch (kind) {
            case Kind::a: v = v + p * Poly(Rational(q - jj + 1)); break;
            case Kind::b: v = v - p * Poly(Rational(q - jj + 1)); break;
            case Kind::c: v = v - p * (Poly::mu() + Poly(Rational(jj - 1))); break;
            case Kind::d: v = v + p * (Poly::mu() + Poly(Rational(jj - 1))); break;
            }
        }
        next[j] = v;
    }
    return next;
}

CommutatorTable build(Kind kind, int m, int q)
{
    const std::size_t len = static_cast<std::size_t>((kind == Kind::a || kind == Kind::b) ? q : m) + 1;
    std::vector<Poly> cur{Poly(Rational(1))};
    for (int k = 1; k <= m; ++k)
        cur = step_up(kind, cur, q, len);
    cur.resize(len);
    return {kind, m, q, cur};
}

std::int64_t binom(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

std::int64_t falling(int n, int k)
{
    if (k > n)
        return 0;
    std::int64_t r = 1;
    for (int i = 0; i < k; ++i)
        r *= n - i;
    return r;
}

Poly rising(int k)
{
    Poly r(Rational(1));
    for (int i = 0; i < k; ++i)
        r = r * (Poly::mu() + Poly(Rational(i)));
    return r;
}

} // namespace

std::pair<CommutatorTable, CommutatorTable> diff_mult_coeffs(int m, int q)
{
    if (m < 0 || q < 0 || q > m)
        throw std::invalid_argument("diff_mult_coeffs: need 0 <= q <= m");
    return {build(Kind::a, m, q), build(Kind::b, m, q)};
}

std::pair<CommutatorTable, CommutatorTable> frac_mult_coeffs(int m)
{
    if (m < 0)
        throw std::invalid_argument("frac_mult_coeffs: need m >= 0");
    return {build(Kind::c, m, m), build(Kind::d, m, m)};
}

CommutatorTable closed_form_table(Kind kind, int m, int q)
{
    CommutatorTable t{kind, m, kind == Kind::c || kind == Kind::d ? m : q, {}};
    if (kind == Kind::a || kind == Kind::b) {
        for (int j = 0; j <= q; ++j) {
            std::int64_t v = binom(q, j) * falling(m, j);
            if (kind == Kind::b && j % 2)
                v = -v;
            t.coeffs.emplace_back(Rational(v));
        }
    } else {
        for (int j = 0; j <= m; ++j) {
            Poly v = rising(j) * Poly(Rational(binom(m, j)));
            if (kind == Kind::c && j % 2)
                v = v * Poly(Rational(-1));
            t.coeffs.push_back(v);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------------------------
// Generalized monomials

namespace {
constexpr double exponent_merge = 1e-9;

bool is_integer(double e)
{
    return std::floor(e) == e;
}
} // namespace

void GenFunction::add(double exponent, long double coefficient)
{
    if (coefficient == 0)
        return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), exponent - exponent_merge,
                               [](const auto& t, double e) { return t.first < e; });
    if (it != terms_.end() && std::fabs(it->first - exponent) <= exponent_merge) {
        it->second += coefficient;
        return;
    }
    terms_.insert(it, {exponent, coefficient});
}

GenFunction& GenFunction::operator+=(const GenFunction& other)
{
    for (const auto& [e, c] : other.terms_)
        add(e, c);
    return *this;
}

GenFunction GenFunction::scaled(long double s) const
{
    GenFunction r;
    for (const auto& [e, c] : terms_)
        r.add(e, c * s);
    return r;
}

GenFunction GenFunction::derivative() const
{
    GenFunction r;
    for (const auto& [e, c] : terms_)
        if (e != 0)
            r.add(e - 1, c * e);
    return r;
}

GenFunction GenFunction::times_t(int power) const
{
    GenFunction r;
    for (const auto& [e, c] : terms_)
        r.add(e + power, c);
    return r;
}

GenFunction GenFunction::frac_integral(double mu) const
{
    if (mu == 0)
        return *this;
    GenFunction r;
    for (const auto& [e, c] : terms_) {
        if (!(e > -1))
            throw HypothesisViolation("non-integrable", "t^" + std::to_string(e) + " is not integrable at 0");
        const long double le = e;
        r.add(e + mu, c * std::tgamma(le + 1.0L) / std::tgamma(le + 1.0L + mu));
    }
    return r;
}

long double GenFunction::value_at_zero(int k) const
{
    long double v = 0;
    for (const auto& [e, c] : terms_) {
        if (e == k) {
            long double f = 1;
            for (int i = 2; i <= k; ++i)
                f *= i;
            v += c * f;
        } else if (e < k && !(is_integer(e) && e >= 0)) {
            throw SingularAtOrigin("derivative of order " + std::to_string(k) + " of t^" + std::to_string(e));
        }
    }
    return v;
}

long double GenFunction::max_abs_coeff() const
{
    long double m = 0;
    for (const auto& t : terms_)
        m = std::max(m, std::fabs(t.second));
    return m;
}

double residual(const GenFunction& lhs, const GenFunction& rhs)
{
    GenFunction diff = lhs;
    diff += rhs.scaled(-1);
    const long double scale = std::max<long double>(1, lhs.max_abs_coeff());
    return static_cast<double>(diff.max_abs_coeff() / scale);
}

RatPoly rp_derivative(const RatPoly& p, int times)
{
    RatPoly r = p;
    for (int k = 0; k < times; ++k) {
        RatPoly n;
        for (const auto& [e, c] : r)
            if (e != 0)
                n[e - 1] += c * Rational(e);
        std::erase_if(n, [](const auto& t) { return t.second == Rational(0); });
        r = std::move(n);
    }
    return r;
}

RatPoly rp_times_t(const RatPoly& p, int power)
{
    RatPoly r;
    for (const auto& [e, c] : p)
        r[e + power] = c;
    return r;
}

GenFunction apply(const Word& w, const GenFunction& f)
{
    GenFunction r = f;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        switch (it->kind) {
        case Op::D: r = r.derivative(); break;
        case Op::M: r = r.times_t(); break;
        case Op::I: r = r.frac_integral(it->order); break;
        }
    }
    return r;
}

RatPoly apply_exact(const Word& w, const RatPoly& f)
{
    RatPoly r = f;
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        switch (it->kind) {
        case Op::D: r = rp_derivative(r); break;
        case Op::M: r = rp_times_t(r, 1); break;
        case Op::I: throw std::invalid_argument("apply_exact: fractional integrals are not rational");
        }
    }
    return r;
}

Series apply(const Word& w, const Series& f)
{
    Series r = f;
    auto it = w.rbegin();
    while (it != w.rend()) {
        if (it->kind == Op::D) {
            int k = 0;
            while (it != w.rend() && it->kind == Op::D) {
                ++k;
                ++it;
            }
            r = differentiate(r, k, true);
            continue;
        }
        if (it->kind == Op::M) {
            Eigen::MatrixXd v = r.values();
            for (Eigen::Index n = 0; n < v.cols(); ++n)
                v.col(n) *= r.mesh()[static_cast<std::size_t>(n)];
            r = Series(r.mesh(), std::move(v), r.first_defined());
        } else if (it->order > 0) {
            r = fracreg::frac_integral(it->order, r);
        }
        ++it;
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Identities

namespace {

Word repeat(Op op, int k)
{
    return Word(static_cast<std::size_t>(std::max(k, 0)), op);
}

Word cat(std::initializer_list<Word> parts)
{
    Word r;
    for (const auto& p : parts)
        r.insert(r.end(), p.begin(), p.end());
    return r;
}

Word D(int k) { return repeat({Op::D, 0}, k); }
Word M(int k) { return repeat({Op::M, 0}, k); }
Word I(double mu) { return Word{{Op::I, mu}}; }

struct Side {
    long double coeff;
    Word word;
};

struct Omega {
    int j;      // uses phi^(j)(0)
    double nu;  // kernel order
};

struct Expansion {
    Word lhs;
    std::vector<Side> rhs;
    std::vector<Omega> omegas;
};

void check_mq(const IdentityParams& p, bool q_positive)
{
    if (p.m < 0 || p.q < (q_positive ? 1 : 0) || p.q > p.m)
        throw std::invalid_argument("identity parameters need " + std::string(q_positive ? "1" : "0") + " <= q <= m");
}

Expansion expansion(const std::string& id, const IdentityParams& p)
{
    Expansion e;
    const int m = p.m, q = p.q;
    const double mu = p.mu;
    if (id == "mfold-1") {
        check_mq(p, false);
        auto a = diff_mult_coeffs(m, q).first;
        e.lhs = cat({D(q), M(m)});
        for (int j = 0; j <= q; ++j)
            e.rhs.push_back({a.value(j), cat({M(m - j), D(q - j)})});
    } else if (id == "mfold-2") {
        check_mq(p, false);
        auto b = diff_mult_coeffs(m, q).second;
        e.lhs = cat({M(m), D(q)});
        for (int j = 0; j <= q; ++j)
            e.rhs.push_back({b.value(j), cat({D(q - j), M(m - j)})});
    } else if (id == "mfold-3" || id == "mfold-4") {
        if (m < 0 || !(mu >= 0))
            throw std::invalid_argument("identity parameters need m >= 0, mu >= 0");
        auto [c, d] = frac_mult_coeffs(m);
        if (id == "mfold-3") {
            e.lhs = cat({I(mu), M(m)});
            for (int j = 0; j <= m; ++j)
                e.rhs.push_back({c.value(j, mu), cat({M(m - j), I(mu + j)})});
        } else {
            e.lhs = cat({M(m), I(mu)});
            for (int j = 0; j <= m; ++j)
                e.rhs.push_back({d.value(j, mu), cat({I(mu + j), M(m - j)})});
        }
    } else if (id == "fi-omega") {
        if (m < 1 || !(mu >= 0))
            throw std::invalid_argument("fi-omega needs m >= 1, mu >= 0");
        e.lhs = cat({D(m), I(mu)});
        e.rhs.push_back({1, cat({I(mu), D(m)})});
        for (int j = 0; j < m; ++j)
            e.omegas.push_back({j, mu - m + 1 + j});
    } else if (id == "lemma-A1") {
        check_mq(p, true);
        if (!(mu > 0))
            throw std::invalid_argument("lemma-A1 needs mu > 0");
        auto d = frac_mult_coeffs(m).second;
        e.lhs = cat({D(q), M(m), I(mu)});
        for (int j = 0; j <= m - q; ++j)
            e.rhs.push_back({d.tilde_value(j, mu), cat({I(mu + m - q - j), M(j)})});
        for (int j = m - q + 1; j <= m; ++j)
            e.rhs.push_back({d.tilde_value(j, mu), cat({I(mu), D(j - (m - q)), M(j)})});
    } else {
        throw std::invalid_argument("unknown identity '" + id + "'");
    }
    return e;
}

void check_hypotheses(const std::string& id, const IdentityParams& p, const MonomialFunction& f)
{
    const double e = f.degree;
    if (id == "fi-omega") {
        const bool smooth = (is_integer(e) && e >= 0) || e > p.m - 1;
        if (!smooth)
            throw HypothesisViolation("fi-omega-smoothness",
                                      "t^" + std::to_string(e) + " lacks " + std::to_string(p.m) + " integrable derivatives");
    }
    if (id == "lemma-A1") {
        for (int j = p.m - p.q + 1; j <= p.m; ++j) {
            const double ej = e + j;
            const int order = j - (p.m - p.q);
            if (!(is_integer(ej) && ej >= 0) && !(ej - order > -1))
                throw HypothesisViolation("lemma-A1-regularity", "t^" + std::to_string(ej) + " lacks the required derivatives");
            for (int k = 0; k < order; ++k) {
                const bool vanishes = is_integer(ej) ? (ej >= 0 && ej != k) : ej > k;
                if (!vanishes)
                    throw HypothesisViolation("lemma-A1-initial-values",
                                              "derivative " + std::to_string(k) + " of t^" + std::to_string(ej) + " is nonzero at 0");
            }
        }
    }
}

double verify_monomial(const std::string& id, const IdentityParams& p, const MonomialFunction& f)
{
    check_hypotheses(id, p, f);
    const Expansion e = expansion(id, p);
    const GenFunction phi(f);
    const GenFunction lhs = identities::apply(e.lhs, phi);
    GenFunction rhs;
    for (const auto& s : e.rhs)
        if (s.coeff != 0)
            rhs += identities::apply(s.word, phi).scaled(s.coeff);
    for (const auto& o : e.omegas) {
        const long double v0 = phi.value_at_zero(o.j);
        if (v0 == 0 || (o.nu <= 0 && is_integer(o.nu)))
            continue;
        rhs.add(o.nu - 1, v0 / std::tgamma(static_cast<long double>(o.nu)));
    }
    return residual(lhs, rhs);
}

double verify_sampled(const std::string& id, const IdentityParams& p, const Series& f)
{
    if (f.dim() != 1 || f.first_defined() != 0)
        throw std::invalid_argument("verify_identity: scalar series defined at t = 0 expected");
    const Expansion e = expansion(id, p);
    const auto& mesh = f.mesh();
    Series lhs = identities::apply(e.lhs, f);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(mesh.size()));
    for (const auto& s : e.rhs)
        if (s.coeff != 0)
            rhs += static_cast<double>(s.coeff) * identities::apply(s.word, f).values();
    for (const auto& o : e.omegas) {
        const double v0 = o.j == 0 ? f.scalar_at(0) : differentiate(f, o.j, true).scalar_at(0);
        for (std::size_t n = 1; n < mesh.size(); ++n)
            rhs(0, static_cast<Eigen::Index>(n)) += v0 * omega(o.nu, mesh[n]);
    }
    // Compare away from the origin, where one-sided differences and kernel singularities live.
    const std::size_t start = std::max<std::size_t>(mesh.lower_index(0.1 * mesh.T()), 1);
    double diff = 0, scale = 1;
    for (std::size_t n = start; n < mesh.size(); ++n) {
        const double l = lhs.values()(0, static_cast<Eigen::Index>(n));
        diff = std::max(diff, std::fabs(l - rhs(0, static_cast<Eigen::Index>(n))));
        scale = std::max(scale, std::fabs(l));
    }
    return diff / scale;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

double verify_identity(const std::string& identity_id, const IdentityParams& params, const TestFunction& f)
{
    if (const auto* mono = std::get_if<MonomialFunction>(&f))
        return verify_monomial(identity_id, params, *mono);
    return verify_sampled(identity_id, params, std::get<Series>(f));
}

bool certify_exact(const CommutatorTable& t)
{
    if (t.kind != Kind::a && t.kind != Kind::b)
        throw std::invalid_argument("certify_exact: only tables a and b are rational");
    for (const auto& c : t.coeffs)
        if (!c.is_constant())
            return false;
    for (int k = 0; k <= t.m + t.q + 2; ++k) {
        const RatPoly phi{{k, Rational(1)}};
        RatPoly lhs, rhs;
        if (t.kind == Kind::a) {
            lhs = apply_exact(cat({D(t.q), M(t.m)}), phi);
            for (int j = 0; j <= t.q; ++j)
                for (const auto& [e, c] : apply_exact(cat({M(t.m - j), D(t.q - j)}), phi))
                    rhs[e] += t.at(j).constant() * c;
        } else {
            lhs = apply_exact(cat({M(t.m), D(t.q)}), phi);
            for (int j = 0; j <= t.q; ++j)
                for (const auto& [e, c] : apply_exact(cat({D(t.q - j), M(t.m - j)}), phi))
                    rhs[e] += t.at(j).constant() * c;
        }
        std::erase_if(rhs, [](const auto& x) { return x.second == Rational(0); });
        if (lhs != rhs)
            return false;
    }
    return true;
}

double certify_numeric(const CommutatorTable& t, double mu)
{
    if (t.kind != Kind::c && t.kind != Kind::d)
        throw std::invalid_argument("certify_numeric: only tables c and d depend on mu");
    double worst = 0;
    for (int k = 0; k <= t.m + 2; ++k) {
        const GenFunction phi(MonomialFunction{static_cast<double>(k), 1});
        GenFunction lhs, rhs;
        if (t.kind == Kind::c) {
            lhs = identities::apply(cat({I(mu), M(t.m)}), phi);
            for (int j = 0; j <= t.m; ++j)
                rhs += identities::apply(cat({M(t.m - j), I(mu + j)}), phi).scaled(t.value(j, mu));
        } else {
            lhs = identities::apply(cat({M(t.m), I(mu)}), phi);
            for (int j = 0; j <= t.m; ++j)
                rhs += identities::apply(cat({I(mu + j), M(t.m - j)}), phi).scaled(t.value(j, mu));
        }
        worst = std::max(worst, residual(lhs, rhs));
    }
    return worst;
}

bool mixed_expansion_consistent(int m)
{
    if (m < 1)
        throw std::invalid_argument("mixed_expansion_consistent: need m >= 1");
    const auto bmm = diff_mult_coeffs(m, m).second;
    const auto bmm1 = diff_mult_coeffs(m, m - 1).second;
    const auto direct = diff_mult_coeffs(m + 1, m).second;
    for (int j = 0; j <= m; ++j) {
        const Rational composed = bmm.tilde(j).constant() - Rational(m) * bmm1.tilde(j).constant();
        if (composed != direct.tilde(j).constant())
            return false;
    }
    return true;
}

std::vector<SuiteRow> run_suite(int max_m, double tol)
{
    if (max_m < 1)
        throw std::invalid_argument("run_suite: max_m must be >= 1");
    const std::vector<double> mus{0.25, 1.0 / 3.0, 0.5, 1.0};
    std::vector<SuiteRow> rows;
    auto push = [&](const std::string& id, int m, const std::string& key, double r) {
        rows.push_back({id, m, key, r, r <= tol});
    };

    for (int m = 0; m <= max_m; ++m) {
        for (int q = 0; q <= m; ++q) {
            const auto [a, b] = diff_mult_coeffs(m, q);
            const bool a_ok = certify_exact(a) && a.coeffs == closed_form_table(Kind::a, m, q).coeffs;
            const bool b_ok = certify_exact(b) && b.coeffs == closed_form_table(Kind::b, m, q).coeffs;
            push("mfold-1", m, "q=" + std::to_string(q), a_ok ? 0.0 : 1.0);
            push("mfold-2", m, "q=" + std::to_string(q), b_ok ? 0.0 : 1.0);
        }
    }
    for (int m = 1; m <= max_m; ++m) {
        const auto [c, d] = frac_mult_coeffs(m);
        const bool c_sym = c.coeffs == closed_form_table(Kind::c, m, m).coeffs;
        const bool d_sym = d.coeffs == closed_form_table(Kind::d, m, m).coeffs;
        bool zero_at_0 = true;
        for (int j = 1; j <= m; ++j)
            zero_at_0 = zero_at_0 && c.at(j)(Rational(0)) == Rational(0) && d.at(j)(Rational(0)) == Rational(0);
        for (double mu : mus) {
            push("mfold-3", m, "mu=" + fmt(mu), c_sym && zero_at_0 ? certify_numeric(c, mu) : 1.0);
            push("mfold-4", m, "mu=" + fmt(mu), d_sym && zero_at_0 ? certify_numeric(d, mu) : 1.0);
        }
        push("mixed-expansion", m, "q=" + std::to_string(m), mixed_expansion_consistent(m) ? 0.0 : 1.0);
    }
    for (int m = 1; m <= max_m; ++m) {
        for (double mu : {0.0, 0.25, 1.0 / 3.0, 0.5, 1.0}) {
            double worst = 0;
            for (int p = 0; p <= m + 2; ++p)
                worst = std::max(worst, verify_identity("fi-omega", {m, 0, mu}, MonomialFunction{static_cast<double>(p), 1}));
            worst = std::max(worst, verify_identity("fi-omega", {m, 0, mu}, MonomialFunction{m - 0.5, 1}));
            push("fi-omega", m, "mu=" + fmt(mu), worst);
        }
    }
    for (int m = 1; m <= max_m; ++m) {
        for (int q = 1; q <= m; ++q) {
            for (double mu : mus) {
                double worst = 0;
                for (int p = 0; p <= m + 1; ++p)
                    worst = std::max(worst, verify_identity("lemma-A1", {m, q, mu}, MonomialFunction{static_cast<double>(p), 1}));
                push("lemma-A1", m, "q=" + std::to_string(q) + ";mu=" + fmt(mu), worst);
            }
        }
    }
    return rows;
}

} // namespace fracreg::identities
