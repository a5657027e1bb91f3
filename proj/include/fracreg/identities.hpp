#pragma once

#include "fracreg/mesh.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fracreg::identities {

using Rational = boost::rational<std::int64_t>;

// Polynomial in the symbol mu with rational coefficients; coeffs[i] multiplies mu^i.
class Poly {
public:
    Poly() = default;
    Poly(Rational c) : coeffs_{c} { trim(); }
    explicit Poly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
    static Poly mu() { return Poly(std::vector<Rational>{0, 1}); }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    bool is_constant() const { return coeffs_.size() <= 1; }
    Rational constant() const { return coeffs_.empty() ? Rational(0) : coeffs_[0]; }

    Rational operator()(Rational x) const;
    long double operator()(long double x) const;

    friend Poly operator+(const Poly& a, const Poly& b);
    friend Poly operator-(const Poly& a, const Poly& b);
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

    std::string str() const;

private:
    void trim();
    std::vector<Rational> coeffs_;
};

enum class Kind { a, b, c, d };
const char* kind_name(Kind k);

// Coefficients of one of the four commutator expansions:
//   a:  d^q M^m   = M^m d^q + sum_{j=1}^q a_j M^(m-j) d^(q-j)
//   b:  M^m d^q   = d^q M^m + sum_{j=1}^q b_j d^(q-j) M^(m-j)
//   c:  I^mu M^m  = M^m I^mu + sum_{j=1}^m c_j M^(m-j) I^(mu+j)
//   d:  M^m I^mu  = I^mu M^m + sum_{j=1}^m d_j I^(mu+j) M^(m-j)
// with coefficient 0 equal to one.  M is multiplication by t, d is d/dt.  For kinds c and d the
// entries are polynomials in mu; for a and b they are constants.
struct CommutatorTable {
    Kind kind;
    int m;
    int q; // second index for a, b; equals m for c, d
    std::vector<Poly> coeffs;

    const Poly& at(int j) const;
    // Reindexed family: tilde_j = coeff_{q-j} (a, b) or coeff_{m-j} (c, d); zero out of range.
    Poly tilde(int j) const;
    long double value(int j, long double mu = 0) const;
    long double tilde_value(int j, long double mu = 0) const;
};

// Built by recursion on m from the base commutators.
std::pair<CommutatorTable, CommutatorTable> diff_mult_coeffs(int m, int q);
std::pair<CommutatorTable, CommutatorTable> frac_mult_coeffs(int m);

// Closed forms, used as an independent second certificate alongside the monomial oracle.
CommutatorTable closed_form_table(Kind kind, int m, int q);

// ---------------------------------------------------------------------------------------------
// Monomial oracle.

// coefficient * t^degree.  Degrees need not be integers, but identities involving I^mu require
// degree > -1.
struct MonomialFunction {
    double degree = 0;
    long double coefficient = 1;
};

// Finite sum of generalized monomials c t^e, kept sorted by exponent.
class GenFunction {
public:
    GenFunction() = default;
    GenFunction(MonomialFunction f) { add(f.degree, f.coefficient); }

    void add(double exponent, long double coefficient);
    GenFunction& operator+=(const GenFunction& other);
    GenFunction scaled(long double s) const;

    GenFunction derivative() const;
    GenFunction times_t(int power = 1) const;
    GenFunction frac_integral(double mu) const; // throws HypothesisViolation for exponents <= -1
    long double value_at_zero(int derivative_order) const;

    const std::vector<std::pair<double, long double>>& terms() const { return terms_; }
    long double max_abs_coeff() const;

private:
    std::vector<std::pair<double, long double>> terms_;
};

// Normalized coefficient distance max|l - r| / max(1, max|l|).
double residual(const GenFunction& lhs, const GenFunction& rhs);

// Exact polynomial with rational coefficients, integer degrees.
using RatPoly = std::map<int, Rational>;
RatPoly rp_derivative(const RatPoly& p, int times = 1);
RatPoly rp_times_t(const RatPoly& p, int power);

// Operator words, applied right to left: {D, M, I(0.5)} means D(M(I^0.5 phi)).
struct Op {
    enum Kind { D, M, I } kind;
    double order = 0; // only for I
};
using Word = std::vector<Op>;

GenFunction apply(const Word& w, const GenFunction& f);
RatPoly apply_exact(const Word& w, const RatPoly& f);
Series apply(const Word& w, const Series& f);

// ---------------------------------------------------------------------------------------------

struct IdentityParams {
    int m = 1;
    int q = 0;
    double mu = 0.5;
};

using TestFunction = std::variant<MonomialFunction, Series>;

// identity_id in {mfold-1, mfold-2, mfold-3, mfold-4, fi-omega, lemma-A1}.  Returns the
// max-norm residual between both sides.  Sampled series are compared on nodes away from t = 0.
double verify_identity(const std::string& identity_id, const IdentityParams& params, const TestFunction& f);

// Exact certification of the a/b tables on t^k, 0 <= k <= m + q + 2.  Returns true iff both
// sides agree as rational polynomials.
bool certify_exact(const CommutatorTable& table);

// Max residual of a c/d table on t^k, 0 <= k <= m + 2, at the given mu.
double certify_numeric(const CommutatorTable& table, double mu);

// Composition check: M^(m+1) d^m expanded through M d^m = d^m M - m d^(m-1) agrees with the
// direct table b^(m+1, m).
bool mixed_expansion_consistent(int m);

struct SuiteRow {
    std::string identity_id;
    int m;
    std::string q_or_mu;
    double residual;
    bool pass;
};

// Full table suite for m <= max_m: recursion vs closed forms, exact certification, Gamma-ratio
// certification, the shift identity and the appendix identity on monomials.
std::vector<SuiteRow> run_suite(int max_m, double tol = 1e-12);

} // namespace fracreg::identities
