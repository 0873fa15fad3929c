#pragma once

#include <stdexcept>
#include <string>

namespace geohopca {

enum class ErrorKind {
    InvalidArgument,  // precondition / shape / range violations
    Io,               // unreadable or malformed files
    Infeasible,       // no admissible support exists
    SearchAborted,    // tree search exceeded its node budget
    Numeric,          // eigen-solver failed to converge
};

/// Library-wide exception. The kind drives CLI exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace detail
}  // namespace geohopca
