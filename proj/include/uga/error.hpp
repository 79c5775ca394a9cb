#pragma once

#include <stdexcept>
#include <string>

namespace uga {

/// Input violates a documented precondition (dimension mismatch, bad epsilon, ...).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Cholesky pivot fell below tolerance; callers fall back to the thin factorization.
class NotPositiveDefinite : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column rank deficiency detected by an orthogonal factorization.
class RankDeficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative kernel hit its iteration cap.
class ConvergenceFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense verification path was asked to materialize a matrix above the size cap.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A subset-selection coefficient went negative beyond roundoff.
class NonnegativityViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed input file.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace uga
