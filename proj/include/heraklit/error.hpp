#pragma once

#include <stdexcept>
#include <string>

namespace heraklit {

// Hard errors indicate a malformed model or misuse of an operation.
// Recoverable diagnostics (well-formedness, structure validation) are
// reported as data instead; see ValidationReport.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct EvalError : Error {
    explicit EvalError(const std::string& what) : Error(what) {}
};

struct ModelError : Error {
    explicit ModelError(const std::string& what) : Error(what) {}
};

struct CompositionError : Error {
    explicit CompositionError(const std::string& what) : Error(what) {}
};

struct FiringError : Error {
    explicit FiringError(const std::string& what) : Error(what) {}
};

struct ParseError : Error {
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line(line), column(column) {}
    std::size_t line;
    std::size_t column;
};

}  // namespace heraklit
