#pragma once

#include <stdexcept>

namespace carnot {

/// Unreadable or ungrammatical input: group files, scenario files, polynomials.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Well-formed input that violates a mathematical precondition (axiom failure,
/// non-complementary subspaces, point outside a domain, degenerate sampler, ...).
struct semantic_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical identity that should hold failed beyond its tolerance.
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace carnot
