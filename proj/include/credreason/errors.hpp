#pragma once

#include <stdexcept>
#include <string>

namespace credreason {

// Error categories map 1:1 onto CLI exit codes.
enum class ErrorCategory {
    usage = 2,       // bad command line
    config = 3,      // bad configuration, missing files, unknown company
    backend = 4,     // transport / generation failures
    validation = 5,  // hard protocol violations, malformed model output
};

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }
    int exit_code() const noexcept { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class UsageError : public Error {
public:
    explicit UsageError(std::string message) : Error(ErrorCategory::usage, std::move(message)) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::string message) : Error(ErrorCategory::config, std::move(message)) {}
};

class BackendError : public Error {
public:
    explicit BackendError(std::string message, bool retryable = false)
        : Error(ErrorCategory::backend, std::move(message)), retryable_(retryable) {}

    bool retryable() const noexcept { return retryable_; }

private:
    bool retryable_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::string message)
        : Error(ErrorCategory::validation, std::move(message)) {}
};

// Web search attempted by a role without the search permission. Hard by definition.
class PermissionError : public ValidationError {
public:
    explicit PermissionError(std::string message) : ValidationError(std::move(message)) {}
};

}  // namespace credreason
