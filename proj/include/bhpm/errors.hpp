#pragma once

#include <stdexcept>
#include <string>

namespace bhpm {

// Failure categories. The CLI maps them onto exit codes.
enum class ErrorKind {
    structural,   // order/base mismatch, depth exceeded, bad sizes
    division,     // reciprocal of a jet with zero constant term
    branch_cut,   // quarter root requested on the closed negative axis
    domain,       // potential evaluated outside its domain
    accuracy,     // quadrature or refinement did not converge
    regime,       // assumption / admissibility violation
    geometry,     // cutoff geometry cannot be built
    data,         // bad fit input
    usage,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::division: return "division";
    case ErrorKind::branch_cut: return "branch-cut";
    case ErrorKind::domain: return "domain";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::regime: return "regime";
    case ErrorKind::geometry: return "geometry";
    case ErrorKind::data: return "data";
    case ErrorKind::usage: return "usage";
    }
    return "unknown";
}

} // namespace bhpm
