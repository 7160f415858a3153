#pragma once

#include <stdexcept>
#include <string>

namespace herdbif {

/// Base class for numerical failures raised by the library. Input/precondition
/// problems use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A simulated state component fell below -1e-9 (integration failure; the
/// caller may retry with a smaller step).
class NonPositiveState : public Error {
public:
    explicit NonPositiveState(const std::string& msg) : Error("NonPositiveState: " + msg) {}
};

/// A simulated state stopped being finite.
class NonFinite : public Error {
public:
    explicit NonFinite(const std::string& msg) : Error("NonFinite: " + msg) {}
};

/// A bisection bracket does not straddle the sought transition.
class InvalidBracket : public Error {
public:
    explicit InvalidBracket(const std::string& msg) : Error("InvalidBracket: " + msg) {}
};

/// A sampling design cannot support the requested statistic.
class DegenerateDesign : public Error {
public:
    explicit DegenerateDesign(const std::string& msg) : Error("DegenerateDesign: " + msg) {}
};

}  // namespace herdbif
