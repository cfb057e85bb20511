#pragma once

#include <stdexcept>
#include <string>

namespace ovb {

// Caller passed arguments that violate an operation's contract.
struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A floating-point quantity left its mathematical domain by more than the
// accepted clamping tolerance.
struct numeric_domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Two chord endpoints coincide; the chord quantities are undefined.
struct degenerate_chord_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Phase point too close to the tangential boundary psi = 0 or pi.
struct whisper_orbit_error : std::domain_error {
    using std::domain_error::domain_error;
};

// A curve failed one of the oval invariants; the message names it.
struct invalid_oval_error : std::runtime_error {
    explicit invalid_oval_error(const std::string& invariant, const std::string& detail = {})
        : std::runtime_error("invalid oval: failed invariant '" + invariant + "'" +
                             (detail.empty() ? "" : " (" + detail + ")")),
          failed_invariant(invariant) {}
    std::string failed_invariant;
};

// Root/intersection search could not complete at the requested tolerance.
struct solver_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative refinement did not converge within the iteration budget.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A twist coupling b_i vanished; the residue quotient cannot be formed.
struct twist_degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ovb
