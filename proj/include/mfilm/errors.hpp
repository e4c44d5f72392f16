#pragma once

#include <stdexcept>
#include <string>

namespace mfilm {

// Parameter outside the domain of a formula (pole, beta >= 72, ...).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Lattice index outside the retained truncation.
struct RangeError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// Inconsistent arguments (mismatched lattices, wrong regime, ...).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateEigenvalueError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExtractionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BranchError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConnectionNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PropertyViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace mfilm
