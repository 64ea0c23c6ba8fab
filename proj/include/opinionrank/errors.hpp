#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace opinionrank {

// Power iteration did not reach the stationary tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, std::size_t iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

// Malformed annotation input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that fails a cross-file consistency check.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& message, std::vector<std::string> offenders)
        : std::runtime_error(message), offenders_(std::move(offenders)) {}

    const std::vector<std::string>& offenders() const noexcept { return offenders_; }

private:
    std::vector<std::string> offenders_;
};

// Failure inside one Monte-Carlo trial; carries the trial index.
class TrialError : public std::runtime_error {
public:
    TrialError(std::size_t trial, const std::string& cause)
        : std::runtime_error("trial " + std::to_string(trial) + ": " + cause), trial_(trial) {}

    std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

}  // namespace opinionrank
