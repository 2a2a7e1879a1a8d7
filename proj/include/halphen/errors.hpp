#ifndef HALPHEN_ERRORS_HPP
#define HALPHEN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace halphen {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input outside the supported domain (Im tau too small, r = 0, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Requested tail tolerance not reachable within max_terms.
class TruncationError : public Error {
public:
    TruncationError(const std::string& msg, double bound)
        : Error(msg), achieved_bound(bound) {}
    double achieved_bound;
};

/// ODE solution escaped the overflow guard in finite time.
class SingularityError : public Error {
public:
    SingularityError(const std::string& msg, double t)
        : Error(msg), escape_time(t) {}
    double escape_time;
};

/// A result failed an internal consistency requirement (e.g. a value that
/// must be real came out with a large imaginary part).
class ConsistencyError : public Error {
public:
    explicit ConsistencyError(const std::string& msg) : Error(msg) {}
};

/// Quadrature or eigensolver failed to reach the requested accuracy.
class AccuracyError : public Error {
public:
    explicit AccuracyError(const std::string& msg) : Error(msg) {}
};

/// Operation requires a specific configuration mode (e.g. the BPS limit).
class ModeError : public Error {
public:
    explicit ModeError(const std::string& msg) : Error(msg) {}
};

/// Rational map with vanishing resultant (shared numerator/denominator root).
class DegenerateMapError : public Error {
public:
    explicit DegenerateMapError(const std::string& msg) : Error(msg) {}
};

/// Scattering decay/growth splitting lost numerical rank.
class ConditioningError : public Error {
public:
    explicit ConditioningError(const std::string& msg) : Error(msg) {}
};

/// No parameter subinterval satisfies a positivity requirement.
class EmptyDomainError : public Error {
public:
    explicit EmptyDomainError(const std::string& msg) : Error(msg) {}
};

} // namespace halphen

#endif
