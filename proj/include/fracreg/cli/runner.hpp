#pragma once

#include "fracreg/cli/config.hpp"

#include <string>
#include <vector>

namespace fracreg::cli {

enum ExitCode { ok = 0, check_failed = 1, usage_error = 2, io_error = 3 };

struct CheckSummary {
    std::string name;
    int total = 0;
    int failed = 0;
};

// Runs one subcommand; writes CSVs and manifest.json under cfg.out.
ExitCode run(const RunConfig& cfg, std::vector<CheckSummary>& summary);

// Parses argv (subcommand plus flags) and runs it.
int main_entry(int argc, char** argv);

} // namespace fracreg::cli
