#pragma once

#include <stdexcept>
#include <string>

namespace minflow {

// Bad user input or violated precondition (infeasible data, grid mismatch,
// unbalanced masses). CLI maps this to exit code 2.
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& msg) : std::runtime_error(msg) {}
};

// An iterative solver failed to reach its tolerance. CLI maps this to exit
// code 3.
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& msg) : std::runtime_error(msg) {}
};

// Interpolated density fell below the positivity floor; the inputs were not
// regularized.
class DegenerateDensity : public SolverFailure {
public:
    explicit DegenerateDensity(const std::string& msg) : SolverFailure(msg) {}
};

} // namespace minflow
