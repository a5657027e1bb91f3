#include "fracreg/cli/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace fracreg::cli {

namespace {

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class T>
std::string join(const std::vector<T>& v)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << v[i];
    return os.str();
}

double to_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v)
{
    try {
        std::size_t used = 0;
        const long long i = std::stoll(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    }
}

std::size_t to_size(const std::string& key, const std::string& v)
{
    const long long i = to_int(key, v);
    if (i < 0)
        throw ConfigError(key + ": must be non-negative");
    return static_cast<std::size_t>(i);
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> table = {
        {"run.command", [](RunConfig& c, const std::string& v) { c.command = v; }},
        {"run.seed",
         [](RunConfig& c, const std::string& v) {
             try {
                 c.seed = std::stoull(v);
             } catch (const std::exception&) {
                 throw ConfigError("run.seed: expected an unsigned integer");
             }
         }},
        {"run.jobs", [](RunConfig& c, const std::string& v) { c.jobs = static_cast<unsigned>(to_size("run.jobs", v)); }},
        {"run.out", [](RunConfig& c, const std::string& v) { c.out = v; }},
        {"problem.alpha", [](RunConfig& c, const std::string& v) { c.problem.alpha = to_double("problem.alpha", v); }},
        {"problem.T", [](RunConfig& c, const std::string& v) { c.problem.T = to_double("problem.T", v); }},
        {"problem.kappa", [](RunConfig& c, const std::string& v) { c.problem.kappa = v; }},
        {"problem.F", [](RunConfig& c, const std::string& v) { c.problem.F = v; }},
        {"problem.G", [](RunConfig& c, const std::string& v) { c.problem.G = v; }},
        {"problem.a", [](RunConfig& c, const std::string& v) { c.problem.a = v; }},
        {"problem.b", [](RunConfig& c, const std::string& v) { c.problem.b = v; }},
        {"problem.u0", [](RunConfig& c, const std::string& v) { c.problem.u0 = v; }},
        {"problem.u0_mu", [](RunConfig& c, const std::string& v) { c.problem.u0_mu = to_double("problem.u0_mu", v); }},
        {"problem.g", [](RunConfig& c, const std::string& v) { c.problem.g = v; }},
        {"problem.g_eta", [](RunConfig& c, const std::string& v) { c.problem.g_eta = to_double("problem.g_eta", v); }},
        {"problem.g_M", [](RunConfig& c, const std::string& v) { c.problem.g_M = to_double("problem.g_M", v); }},
        {"scheme.N", [](RunConfig& c, const std::string& v) { c.scheme.N = to_size("scheme.N", v); }},
        {"scheme.gamma", [](RunConfig& c, const std::string& v) { c.scheme.gamma = to_double("scheme.gamma", v); }},
        {"scheme.n_x", [](RunConfig& c, const std::string& v) { c.scheme.n_x = to_size("scheme.n_x", v); }},
        {"scheme.modes", [](RunConfig& c, const std::string& v) { c.scheme.modes = to_size("scheme.modes", v); }},
        {"scheme.method", [](RunConfig& c, const std::string& v) { c.scheme.method = v; }},
        {"identities.max_m",
         [](RunConfig& c, const std::string& v) { c.max_m = static_cast<int>(to_int("identities.max_m", v)); }},
        {"identities.tol", [](RunConfig& c, const std::string& v) { c.identity_tol = to_double("identities.tol", v); }},
        {"inequalities.suites", [](RunConfig& c, const std::string& v) { c.suites = split_list(v); }},
        {"inequalities.count",
         [](RunConfig& c, const std::string& v) { c.count = static_cast<int>(to_int("inequalities.count", v)); }},
        {"inequalities.N", [](RunConfig& c, const std::string& v) { c.suite_N = to_size("inequalities.N", v); }},
        {"rates.experiments", [](RunConfig& c, const std::string& v) { c.experiments = split_list(v); }},
        {"rates.theorem", [](RunConfig& c, const std::string& v) { c.theorem = v; }},
        {"rates.quantity", [](RunConfig& c, const std::string& v) { c.quantity = v; }},
        {"rates.m", [](RunConfig& c, const std::string& v) { c.m = static_cast<int>(to_int("rates.m", v)); }},
        {"rates.nu", [](RunConfig& c, const std::string& v) { c.nu = to_double("rates.nu", v); }},
        {"rates.tol", [](RunConfig& c, const std::string& v) { c.rate_tol = to_double("rates.tol", v); }},
        {"convergence.N",
         [](RunConfig& c, const std::string& v) {
             c.Ns.clear();
             for (const auto& s : split_list(v))
                 c.Ns.push_back(to_size("convergence.N", s));
         }},
    };
    return table;
}

} // namespace

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> parts, out;
    boost::split(parts, s, boost::is_any_of(","));
    for (auto& p : parts) {
        boost::trim(p);
        if (!p.empty())
            out.push_back(p);
    }
    return out;
}

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

void apply_ini_text(RunConfig& cfg, const std::string& text)
{
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + std::string(e.what()));
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            const auto it = setters().find(full);
            if (it == setters().end())
                throw ConfigError("config: unknown key '" + full + "'");
            it->second(cfg, boost::trim_copy(value.data()));
        }
    }
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    apply_ini_text(cfg, ss.str());
    return cfg;
}

std::vector<std::string> RunConfig::canonical() const
{
    std::vector<std::string> v = {
        "run.command=" + command,
        "run.seed=" + std::to_string(seed),
        "problem.alpha=" + fmt(problem.alpha),
        "problem.T=" + fmt(problem.T),
        "problem.kappa=" + problem.kappa,
        "problem.F=" + problem.F,
        "problem.G=" + problem.G,
        "problem.a=" + problem.a,
        "problem.b=" + problem.b,
        "problem.u0=" + problem.u0,
        "problem.u0_mu=" + (problem.u0_mu ? fmt(*problem.u0_mu) : "default"),
        "problem.g=" + problem.g,
        "problem.g_eta=" + fmt(problem.g_eta),
        "problem.g_M=" + (problem.g_M ? fmt(*problem.g_M) : "default"),
        "scheme.N=" + std::to_string(scheme.N),
        "scheme.gamma=" + fmt(scheme.gamma),
        "scheme.n_x=" + std::to_string(scheme.n_x),
        "scheme.modes=" + std::to_string(scheme.modes),
        "scheme.method=" + scheme.method,
        "identities.max_m=" + std::to_string(max_m),
        "identities.tol=" + fmt(identity_tol),
        "inequalities.suites=" + join(suites),
        "inequalities.count=" + std::to_string(count),
        "inequalities.N=" + std::to_string(suite_N),
        "rates.experiments=" + join(experiments),
        "rates.theorem=" + theorem.value_or(""),
        "rates.quantity=" + quantity.value_or(""),
        "rates.m=" + (m ? std::to_string(*m) : ""),
        "rates.nu=" + (nu ? fmt(*nu) : ""),
        "rates.tol=" + fmt(rate_tol),
        "convergence.N=" + join(Ns),
    };
    std::sort(v.begin(), v.end());
    return v;
}

std::string RunConfig::hash() const
{
    std::string text;
    for (const auto& line : canonical())
        text += line + "\n";
    return fnv1a_hex(text);
}

} // namespace fracreg::cli
