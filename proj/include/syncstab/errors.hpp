#pragma once

#include <stdexcept>
#include <string>

namespace syncstab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the operation's domain (negative inductance, t_fault >= t_end, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A parameter set violates a type invariant (H_v <= 0, R_L <= 0, ...).
class InvariantError : public Error {
public:
    using Error::Error;
};

/// Zero connecting reactance between the two voltage sources.
class SingularNetworkError : public Error {
public:
    using Error::Error;
};

/// The reduced model has no isolated equilibrium (P_syn_max = 0).
class DegenerateModelError : public Error {
public:
    using Error::Error;
};

/// One-sided derivative requested exactly at the matched-ratio kink.
class NonDifferentiableError : public Error {
public:
    using Error::Error;
};

/// A stability region was requested for a model without an SEP.
class RegionUndefinedError : public Error {
public:
    using Error::Error;
};

/// Controller design has no admissible solution.
class DesignInfeasibleError : public Error {
public:
    using Error::Error;
};

/// The integrator produced a non-finite state.
class IntegrationDivergedError : public Error {
public:
    using Error::Error;
};

/// Scenario text that does not match the schema. `line` is 1-based, 0 if unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line) : Error(what), line_(line) {}
    [[nodiscard]] int line() const { return line_; }

private:
    int line_ = 0;
};

}  // namespace syncstab
