#pragma once

#include <stdexcept>
#include <string>

namespace nlki {

// Input or configuration that violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A service returned something that breaks its contract (bad shape, dim drift).
class ContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Network failure, timeout, or non-2xx status from a remote service.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file; carries the 1-based line number where it was found.
class ParseError : public ValidationError {
public:
    ParseError(std::size_t line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

}  // namespace nlki
