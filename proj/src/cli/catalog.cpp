#include "fracreg/cli/catalog.hpp"

#include <cmath>
#include <map>

namespace fracreg::cli {

namespace {

using fem::SpaceFn;
using fem::SpaceTimeFn;

struct Drift {
    SpaceTimeFn f, df;
};

Drift drift(const std::string& family, const std::string& name)
{
    if (name == "zero")
        return {};
    if (name == "sin(pi x)*(1+t)")
        return {[](double x, double t) { return std::sin(M_PI * x) * (1 + t); },
                [](double x, double) { return std::sin(M_PI * x); }};
    throw ConfigError(family + ": unknown coefficient '" + name + "'");
}

Drift reaction(const std::string& family, const std::string& name)
{
    if (name == "zero")
        return {};
    if (name == "one")
        return {[](double, double) { return 1.0; }, {}};
    throw ConfigError(family + ": unknown coefficient '" + name + "'");
}

} // namespace

std::vector<std::string> catalog_names(const std::string& family)
{
    static const std::map<std::string, std::vector<std::string>> names = {
        {"kappa", {"one", "1+x^2/2"}},
        {"F", {"zero", "sin(pi x)*(1+t)"}},
        {"G", {"zero", "sin(pi x)*(1+t)"}},
        {"a", {"zero", "one"}},
        {"b", {"zero", "one"}},
        {"u0", {"zero", "sine-k", "indicator-one"}},
        {"g", {"zero", "power-sine"}},
    };
    const auto it = names.find(family);
    return it == names.end() ? std::vector<std::string>{} : it->second;
}

solver::ProblemSpec build_problem(const ProblemConfig& cfg)
{
    solver::ProblemSpec p;
    p.alpha = cfg.alpha;
    p.T = cfg.T;

    if (cfg.kappa == "one")
        p.coeffs.kappa = [](double) { return 1.0; };
    else if (cfg.kappa == "1+x^2/2")
        p.coeffs.kappa = [](double x) { return 1.0 + 0.5 * x * x; };
    else
        throw ConfigError("kappa: unknown coefficient '" + cfg.kappa + "'");

    const Drift F = drift("F", cfg.F), G = drift("G", cfg.G);
    const Drift a = reaction("a", cfg.a), b = reaction("b", cfg.b);
    p.coeffs.F = F.f;
    p.coeffs.dF = F.df;
    p.coeffs.G = G.f;
    p.coeffs.dG = G.df;
    p.coeffs.a = a.f;
    p.coeffs.da = a.df;
    p.coeffs.b = b.f;
    p.coeffs.db = b.df;

    double mu = 2;
    if (cfg.u0 == "zero") {
        p.u0 = [](double) { return 0.0; };
    } else if (cfg.u0 == "indicator-one") {
        // In the domain of A^(mu/2) only for mu < 1/2.
        p.u0 = [](double) { return 1.0; };
        mu = 0.5;
    } else if (cfg.u0.rfind("sine-", 0) == 0) {
        int k = 0;
        try {
            k = std::stoi(cfg.u0.substr(5));
        } catch (const std::exception&) {
        }
        if (k < 1)
            throw ConfigError("u0: bad mode number in '" + cfg.u0 + "'");
        p.u0 = [k](double x) { return std::sin(k * M_PI * x); };
    } else {
        throw ConfigError("u0: unknown initial data '" + cfg.u0 + "'");
    }
    p.u0_regularity_mu = cfg.u0_mu.value_or(mu);

    if (cfg.g == "power-sine") {
        const double eta = cfg.g_eta;
        if (!(eta > 0))
            throw ConfigError("g_eta must be positive");
        p.source = solver::Source::separable_source([](double x) { return std::sin(M_PI * x); },
                                                    [eta](double t) { return std::pow(t, eta - 1); },
                                                    [eta](double t) { return std::pow(t, eta) / eta; });
        // |d^j/dt^j t^(eta-1)| |sin| for j <= 2.
        const double c = std::max({1.0, std::fabs(eta - 1), std::fabs((eta - 1) * (eta - 2))});
        p.source_M = cfg.g_M.value_or(c / std::sqrt(2.0));
        p.source_eta = eta;
    } else if (cfg.g != "zero") {
        throw ConfigError("g: unknown source '" + cfg.g + "'");
    } else {
        p.source_M = cfg.g_M.value_or(0.0);
        p.source_eta = cfg.g_eta;
    }
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

} // namespace fracreg::cli
