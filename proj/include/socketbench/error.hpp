#pragma once

#include <stdexcept>
#include <string>

namespace socketbench {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input text could not be parsed (malformed JSON, bad CSV cell, missing column).
class ParseError : public Error {
public:
    using Error::Error;
};

// Parsed data violates a documented invariant. `field()` names the offender.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Argument outside the mathematical domain of an operation (non-positive mass, zero area...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A model was asked to evaluate outside its validity range.
class ModelError : public Error {
public:
    using Error::Error;
};

// Illegal state-machine transition.
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace socketbench
