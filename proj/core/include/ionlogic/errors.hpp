#pragma once

#include <stdexcept>
#include <string>

namespace ionlogic {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (bad n_max, unknown recipe, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Population reached the top of the Fock truncation.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// A pulse whose reference coupling vanishes cannot be given an area.
class DegeneratePulseError : public Error {
public:
    using Error::Error;
};

/// Perturbative level assignment broke down in the dressed spectrum.
class StrongCouplingError : public Error {
public:
    using Error::Error;
};

/// Readout mixture weight cannot be identified from the data.
class UnidentifiableError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// Nonlinear fit failed; the message carries diagnostics.
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace ionlogic
