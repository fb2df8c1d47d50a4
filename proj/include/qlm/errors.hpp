#pragma once

#include <stdexcept>
#include <string>

namespace qlm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An iterative numerical procedure did not reach its tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// An integrand or intermediate quantity became NaN or infinite.
class NonFiniteSample : public Error {
public:
    using Error::Error;
};

class NoSignChange : public Error {
public:
    using Error::Error;
};

/// The potential (or its zeroth-order model) supports no bound state.
class NoBoundState : public Error {
public:
    using Error::Error;
};

/// Evaluation requested outside the sampled range of a radial function.
class ExtrapolationError : public Error {
public:
    using Error::Error;
};

}  // namespace qlm
