#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace l0sense {

/// A requested construction cannot exist under its constraints (e.g. more
/// columns than distinct supports, or a packing with too little room).
/// Carries the capacity that would have been achievable.
class InfeasibleError : public std::runtime_error {
public:
    InfeasibleError(const std::string& what, double achievable_capacity)
        : std::runtime_error(what), achievable_(achievable_capacity) {}

    double achievable_capacity() const { return achievable_; }

private:
    double achievable_;
};

/// Malformed text input; `line()` is the 1-based offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Matrix violates a decoding precondition (duplicate or zero columns).
class InvalidMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace l0sense
