#pragma once

#include <stdexcept>
#include <string>

namespace histent {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Two states (or a state and an operator) live in differently sized mode spaces.
class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

// A mode or history index is outside its declared range.
class IndexError : public Error {
public:
    using Error::Error;
};

// A time step has no rule for an occupied source mode.
class MissingRuleError : public Error {
public:
    using Error::Error;
};

// Scenario document failed schema or invariant validation; carries the
// offending field path (JSON-pointer style) for diagnostics.
class ScenarioError : public Error {
public:
    ScenarioError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// Propagator matrix is identically zero (impossible postselection).
class ZeroPropagatorError : public Error {
public:
    using Error::Error;
};

// Sum of propagators vanishes; weak values are undefined (dark port).
class UndefinedWeakValueError : public Error {
public:
    using Error::Error;
};

// Conditioning event has zero probability.
class UndefinedConditionalError : public Error {
public:
    using Error::Error;
};

} // namespace histent
