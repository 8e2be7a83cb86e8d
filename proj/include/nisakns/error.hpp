#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nisakns {

enum class ErrorKind {
    shape,
    domain,
    singular_generator,
    conditioning,
    blow_up,
    stiffness,
    decay,
    grid,
    stencil,
    degenerate_dressing,
    truncation,
    io,
    config,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::shape: return "shape";
        case ErrorKind::domain: return "domain";
        case ErrorKind::singular_generator: return "singular-generator";
        case ErrorKind::conditioning: return "conditioning";
        case ErrorKind::blow_up: return "blow-up";
        case ErrorKind::stiffness: return "stiffness";
        case ErrorKind::decay: return "decay";
        case ErrorKind::grid: return "grid";
        case ErrorKind::stencil: return "stencil";
        case ErrorKind::degenerate_dressing: return "degenerate-dressing";
        case ErrorKind::truncation: return "truncation";
        case ErrorKind::io: return "io";
        case ErrorKind::config: return "config";
    }
    return "unknown";
}

/// Library exception. `value()` carries the offending magnitude when one
/// exists (|det H|, edge magnitude, critical time, ...).
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<double> value = std::nullopt)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what),
          kind_(kind), value_(value) {}

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<double> value() const noexcept { return value_; }

private:
    ErrorKind kind_;
    std::optional<double> value_;
};

/// Numerical thresholds shared by all modules. Defaults are the library's
/// contract values; callers may tighten or loosen them.
struct Tolerances {
    double algebraic = 1e-12;       // trace-zero, zero-diagonal, J sum
    double round_trip = 1e-10;      // a * inv(a) == I
    double singular = 1e-13;        // |det| relative to max entry^n
    double decay = 1e-8;            // edge magnitude of Schwartz-class fields
    double similarity = 1e-8;       // spec(S) vs the lambda list
    double degenerate = 1e-10;      // lambda too close to spec(S)
    double gamma_avoidance = 1e-12; // |Re(lambda (J_j - J_k))| floor
};

}  // namespace nisakns
