#pragma once

#include <stdexcept>
#include <string>

namespace agile {

// Error categories map 1:1 onto CLI exit codes: Usage -> 2, Data -> 3,
// Transport -> 4.
enum class ErrorCategory { Usage, Data, Transport };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorCategory::Usage, what) {}
};

// Anything wrong with the content of an input: malformed records, broken
// cross-references, violated ranges, statistical preconditions.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorCategory::Data, what) {}
};

class ParseError : public DataError {
public:
    explicit ParseError(const std::string& what) : DataError(what) {}
};

class ValidationError : public DataError {
public:
    explicit ValidationError(const std::string& what) : DataError(what) {}
};

class ReferentialError : public DataError {
public:
    explicit ReferentialError(const std::string& what) : DataError(what) {}
};

class LookupError : public DataError {
public:
    explicit LookupError(const std::string& what) : DataError(what) {}
};

// Network / forge side failures.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error(ErrorCategory::Transport, what) {}
};

class AuthError : public TransportError {
public:
    explicit AuthError(const std::string& what) : TransportError(what) {}
};

// Rate limit budget exhausted; callers may retry later.
class RetryableError : public TransportError {
public:
    explicit RetryableError(const std::string& what) : TransportError(what) {}
};

}  // namespace agile
