#pragma once

#include <stdexcept>
#include <string>

namespace lfsrprune {

// Maps one-to-one onto the CLI exit codes (1, 2, 3).
enum class ErrorKind { Usage = 1, Format = 2, Validation = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct UsageError : Error {
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

/// Malformed input data: bad magic, truncated files, inconsistent encodings.
struct FormatError : Error {
    explicit FormatError(const std::string& what) : Error(ErrorKind::Format, what) {}
};

/// Numeric or invariant failure: non-maximal taps, exhausted replay, bad config.
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

}  // namespace lfsrprune
