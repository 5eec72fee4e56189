#pragma once

#include <stdexcept>
#include <string>

namespace carpet {

// Input could not be decoded. `offset` is the byte position when known, -1 otherwise.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg, long offset = -1)
        : std::runtime_error(offset >= 0 ? msg + " (byte " + std::to_string(offset) + ")" : msg),
          offset_(offset) {}
    long offset() const { return offset_; }

private:
    long offset_;
};

// A documented precondition does not hold (disconnected graph, degenerate table,
// spectral gap too small, dimension out of range, ...).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An iterative numerical routine failed to reach its target accuracy.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// carpet_root exhausted all orientations and candidate cells without meeting the
// residual tolerance. Carries the best residual seen so callers can report it.
class NoRootFound : public NumericalError {
public:
    explicit NoRootFound(double best_residual)
        : NumericalError("no root met the residual tolerance; best residual " +
                         std::to_string(best_residual)),
          best_residual_(best_residual) {}
    double best_residual() const { return best_residual_; }

private:
    double best_residual_;
};

} // namespace carpet
