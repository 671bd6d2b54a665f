#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bflow {

/// Failure categories. The CLI maps these onto exit codes and the
/// machine-readable error document.
enum class ErrorKind {
    Domain,          // argument outside the mathematical domain (e.g. rho <= 0)
    GridMismatch,    // fields defined on different grids
    StepSize,        // dt exceeds the CFL bound
    ShockReached,    // flow map lost monotonicity / Jacobian collapsed
    Vacuum,          // disc background would have nonpositive density
    Instability,     // characteristic cubic lost three distinct real roots
    Precondition,    // caller-side normalization or compatibility violated
    Projection,      // disc data not representable by the modal basis
    Convergence,     // iterative solve failed
    Unsupported,     // parameter combination outside the implemented family
    Usage,           // CLI usage error
    Validation,      // config value outside its documented range
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace bflow
