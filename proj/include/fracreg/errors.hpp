#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracreg {

// Raised when a value is requested at t = 0 from a quantity that may blow up there.
class SingularAtOrigin : public std::domain_error {
public:
    explicit SingularAtOrigin(const std::string& what)
        : std::domain_error("singular-at-origin: " + what) {}
};

class EvaluationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A test function or input does not satisfy the hypotheses of the check it was fed to.
class HypothesisViolation : public std::invalid_argument {
public:
    HypothesisViolation(std::string code, const std::string& detail)
        : std::invalid_argument(code + ": " + detail), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class InsufficientSmoothness : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace fracreg
