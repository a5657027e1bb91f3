#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracreg::cli {

// Bad configuration or usage; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable input or unwritable output; maps to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ProblemConfig {
    double alpha = 0.5;
    double T = 1e-4;
    std::string kappa = "one";
    std::string F = "zero", G = "zero", a = "zero", b = "zero";
    std::string u0 = "sine-1";
    std::optional<double> u0_mu;   // defaults to the catalog's regularity for u0
    std::string g = "zero";
    double g_eta = 1.0;
    std::optional<double> g_M;     // defaults to the catalog's bound for g
};

struct SchemeSection {
    std::size_t N = 256;
    double gamma = 3.0;
    std::size_t n_x = 128;
    std::size_t modes = 0;
    std::string method = "auto";   // auto, weak, spectral
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    std::string out = "results";
    ProblemConfig problem;
    SchemeSection scheme;

    // identities
    int max_m = 6;
    double identity_tol = 1e-12;
    // inequalities
    std::vector<std::string> suites;
    int count = 100;
    std::size_t suite_N = 256;
    // rates
    std::vector<std::string> experiments;  // built-in ids; empty means all
    std::optional<std::string> theorem, quantity;
    std::optional<int> m;
    std::optional<double> nu;
    double rate_tol = 0;
    // convergence
    std::vector<std::size_t> Ns{128, 256, 512, 1024};

    // Canonical "section.key=value" lines, sorted; the config hash is taken over these.
    std::vector<std::string> canonical() const;
    std::string hash() const;
};

// Reads an INI file.  Unknown sections or keys are rejected.
RunConfig load_config(const std::string& path);
void apply_ini_text(RunConfig& cfg, const std::string& text);

std::vector<std::string> split_list(const std::string& s);

// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace fracreg::cli
