#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace heatlab {

/// Failure categories surfaced by the library. Every throw carries one of
/// these so callers (and tests) can dispatch without parsing messages.
enum class ErrorKind {
    invalid_param,
    parse_error,
    duplicate_edge,
    disconnected,
    nonpositive_weight,
    unknown_vertex,
    radius_out_of_range,
    domain_mismatch,
    convergence_failure,
    radius_too_small,
    not_admissible,
    solve_failure,
    not_an_eigenfunction,
    not_subharmonic,
    too_large,
    admissibility_violation,
    measure_not_normalized,
    mixed_domains,
    out_of_domain,
    nonpositive_sample,
    lambda_out_of_range,
    degenerate_window,
    io_error,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_param: return "invalid_param";
        case ErrorKind::parse_error: return "parse_error";
        case ErrorKind::duplicate_edge: return "duplicate_edge";
        case ErrorKind::disconnected: return "disconnected";
        case ErrorKind::nonpositive_weight: return "nonpositive_weight";
        case ErrorKind::unknown_vertex: return "unknown_vertex";
        case ErrorKind::radius_out_of_range: return "radius_out_of_range";
        case ErrorKind::domain_mismatch: return "domain_mismatch";
        case ErrorKind::convergence_failure: return "convergence_failure";
        case ErrorKind::radius_too_small: return "radius_too_small";
        case ErrorKind::not_admissible: return "not_admissible";
        case ErrorKind::solve_failure: return "solve_failure";
        case ErrorKind::not_an_eigenfunction: return "not_an_eigenfunction";
        case ErrorKind::not_subharmonic: return "not_subharmonic";
        case ErrorKind::too_large: return "too_large";
        case ErrorKind::admissibility_violation: return "admissibility_violation";
        case ErrorKind::measure_not_normalized: return "measure_not_normalized";
        case ErrorKind::mixed_domains: return "mixed_domains";
        case ErrorKind::out_of_domain: return "out_of_domain";
        case ErrorKind::nonpositive_sample: return "nonpositive_sample";
        case ErrorKind::lambda_out_of_range: return "lambda_out_of_range";
        case ErrorKind::degenerate_window: return "degenerate_window";
        case ErrorKind::io_error: return "io_error";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

} // namespace heatlab
