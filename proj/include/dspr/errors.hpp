#pragma once

#include <stdexcept>
#include <string>

namespace dspr {

// Error taxonomy shared by all modules. Callers that violate documented
// preconditions get InvalidParameter; inputs that are structurally valid but
// make an operation meaningless (e.g. a zero matrix where a ratio is formed)
// get DegenerateInput.

struct InvalidParameter : std::invalid_argument {
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

struct DegenerateInput : std::runtime_error {
    explicit DegenerateInput(const std::string& what) : std::runtime_error(what) {}
};

struct NumericFailure : std::runtime_error {
    explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionViolation : std::logic_error {
    explicit PreconditionViolation(const std::string& what) : std::logic_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace dspr
