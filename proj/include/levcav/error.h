#pragma once

#include <stdexcept>
#include <string>

namespace levcav {

// Bad or inconsistent input parameters. Maps to CLI exit code 2.
class InvalidParameters : public std::invalid_argument {
public:
    InvalidParameters(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Parameters outside the range where the requested analysis is defined
// (no levitation, turning point outside the well, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A numerical procedure failed to converge. Maps to CLI exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace levcav
