#pragma once

#include <stdexcept>
#include <string>

namespace rsle {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BranchCutError : std::runtime_error {
    explicit BranchCutError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BracketError : std::runtime_error {
    explicit BracketError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CollisionError : std::runtime_error {
    explicit CollisionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularEvaluation : std::runtime_error {
    explicit SingularEvaluation(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepFailure : std::runtime_error {
    explicit StepFailure(const std::string& msg) : std::runtime_error(msg) {}
};

struct SwallowedError : std::runtime_error {
    explicit SwallowedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct QuadratureError : std::runtime_error {
    explicit QuadratureError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace rsle
