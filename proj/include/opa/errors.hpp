#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <json.hpp>

namespace opa {

enum class ErrorKind {
    invalid_input,
    invalid_parameter,
    boundary_root,
    aliasing,
    level_too_small,
    ill_conditioned,
    resolution_exceeded,
    construction,
    convergence,
    approximation_budget,
    search_budget,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::invalid_parameter: return "invalid-parameter";
        case ErrorKind::boundary_root: return "boundary-root";
        case ErrorKind::aliasing: return "aliasing";
        case ErrorKind::level_too_small: return "level-too-small";
        case ErrorKind::ill_conditioned: return "ill-conditioned";
        case ErrorKind::resolution_exceeded: return "resolution-exceeded";
        case ErrorKind::construction: return "construction";
        case ErrorKind::convergence: return "convergence";
        case ErrorKind::approximation_budget: return "approximation-budget";
        case ErrorKind::search_budget: return "search-budget";
    }
    return "unknown";
}

// Domain errors (bad inputs) map to exit 2; numerical budget failures to exit 3.
inline bool is_domain_error(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input:
        case ErrorKind::invalid_parameter:
        case ErrorKind::boundary_root:
        case ErrorKind::aliasing:
        case ErrorKind::level_too_small:
            return true;
        default:
            return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(what), kind_(kind), details_(std::move(details)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorKind kind_;
    nlohmann::json details_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              nlohmann::json details = nlohmann::json::object()) {
    throw Error(kind, what, std::move(details));
}

}  // namespace opa
