#pragma once

#include <stdexcept>
#include <string>

namespace mvac {

/// Raised when inputs violate a documented precondition (bad grid, bad
/// parameter, unsupported case). The CLI maps it to exit status 2.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for failures of a numerical procedure on valid inputs. The CLI maps
/// these to exit status 1.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    /// Short machine-readable tag ("no-root", "singular-solve", ...).
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class NoRootError : public NumericalFailure {
public:
    explicit NoRootError(const std::string& what) : NumericalFailure("no-root", what) {}
};

class SingularSolveError : public NumericalFailure {
public:
    explicit SingularSolveError(const std::string& what)
        : NumericalFailure("singular-solve", what) {}
};

/// A closed-form regime formula hit a pole (e.g. weak-field vacuum at σ² = 2r).
class SingularRegimeError : public NumericalFailure {
public:
    explicit SingularRegimeError(const std::string& what)
        : NumericalFailure("singular-regime", what) {}
};

}  // namespace mvac
