#pragma once

#include "fracreg/cli/config.hpp"
#include "fracreg/solver.hpp"

#include <string>
#include <vector>

namespace fracreg::cli {

// Named coefficient and data families.
//   kappa: one, 1+x^2/2
//   F, G:  zero, sin(pi x)*(1+t)
//   a, b:  zero, one
//   u0:    zero, sine-k (k = 1, 2, ...), indicator-one
//   g:     zero, power-sine  (t^(eta-1) sin(pi x))
solver::ProblemSpec build_problem(const ProblemConfig& cfg);
std::vector<std::string> catalog_names(const std::string& family);

} // namespace fracreg::cli
