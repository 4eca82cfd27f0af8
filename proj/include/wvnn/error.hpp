#pragma once

#include <stdexcept>
#include <string>

namespace wvnn {

/// Error categories surfaced by the toolkit. The CLI maps these onto exit
/// codes (near_orthogonal_postselection and degenerate_input -> 2, the rest
/// of the domain/config family -> 1).
enum class Errc {
    unsupported_dimension,
    dimension_mismatch,
    iteration_failure,
    domain_error,
    hermiticity_violation,
    near_orthogonal_postselection,
    degenerate_input,
    numerical_inconsistency,
    excluded_parameter,
    no_real_solution,
    branch_singularity,
    grid_overflow,
    outside_weak_regime,
    not_found,
    invalid_argument,
    io_error,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::unsupported_dimension: return "unsupported-dimension";
        case Errc::dimension_mismatch: return "dimension-mismatch";
        case Errc::iteration_failure: return "iteration-failure";
        case Errc::domain_error: return "domain-error";
        case Errc::hermiticity_violation: return "hermiticity-violation";
        case Errc::near_orthogonal_postselection: return "near-orthogonal-postselection";
        case Errc::degenerate_input: return "degenerate-input";
        case Errc::numerical_inconsistency: return "numerical-inconsistency";
        case Errc::excluded_parameter: return "excluded-parameter";
        case Errc::no_real_solution: return "no-real-solution";
        case Errc::branch_singularity: return "branch-singularity";
        case Errc::grid_overflow: return "grid-overflow";
        case Errc::outside_weak_regime: return "outside-weak-regime";
        case Errc::not_found: return "not-found";
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::io_error: return "io-error";
    }
    return "unknown";
}

/// Single exception type; `payload()` carries the quantity that triggered the
/// error when one exists (overlap value, defect norm, offending parameter).
class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& what, double payload = 0.0)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what),
          code_(code),
          payload_(payload) {}

    Errc code() const noexcept { return code_; }
    double payload() const noexcept { return payload_; }

  private:
    Errc code_;
    double payload_;
};

}  // namespace wvnn
