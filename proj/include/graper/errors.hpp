#pragma once

#include <stdexcept>
#include <string>

namespace graper {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input (dimensions, labels, files, flags).
class InputError : public Error {
public:
    using Error::Error;
};

// An argument outside the domain of a mathematical function.
class DomainError : public Error {
public:
    using Error::Error;
};

// A variational state that violates its invariants.
class InvalidStateError : public Error {
public:
    using Error::Error;
};

// A model/factorization combination that has no derivation.
class UnsupportedError : public InputError {
public:
    using InputError::InputError;
};

// Non-finite objective, failed factorization and similar breakdowns.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, int iteration = -1)
        : Error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")" : what),
          iteration_(iteration) {}

    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace graper
