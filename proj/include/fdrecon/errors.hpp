#pragma once

#include <stdexcept>
#include <string>

namespace fdrecon {

// Error categories map 1:1 onto CLI exit codes (see tools/fdrecon.cpp).
enum class ErrorCategory {
    Structural,  // type invariant broken (length mismatch, bad grid, ...)
    Config,      // infeasible or inconsistent configuration
    Input,       // malformed input file
    Numerical,   // factorization failure after jitter escalation
    Domain,      // operation not defined on this data (empty section, no envelope, ...)
    Io,          // filesystem failure
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}
    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

struct StructuralError : Error {
    explicit StructuralError(const std::string& w) : Error(ErrorCategory::Structural, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorCategory::Config, w) {}
};

struct CsvFormatError : Error {
    explicit CsvFormatError(const std::string& w) : Error(ErrorCategory::Input, w) {}
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorCategory::Numerical, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorCategory::Io, w) {}
};

// q(t) = 0 at a grid point where a pointwise distribution was requested.
struct EmptySectionError : Error {
    explicit EmptySectionError(const std::string& w) : Error(ErrorCategory::Domain, w) {}
};

// A curve with an empty observed set where a non-empty one is required.
struct EmptyCurveError : Error {
    explicit EmptyCurveError(const std::string& w) : Error(ErrorCategory::Domain, w) {}
};

// Envelope construction found no candidate with a defined distance.
struct NoCandidatesError : Error {
    explicit NoCandidatesError(const std::string& w) : Error(ErrorCategory::Domain, w) {}
};

// Reconstruction requested from an empty envelope.
struct NoEnvelopeError : Error {
    explicit NoEnvelopeError(const std::string& w) : Error(ErrorCategory::Domain, w) {}
};

}  // namespace fdrecon
