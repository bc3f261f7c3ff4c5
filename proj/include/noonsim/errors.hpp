#pragma once

#include <stdexcept>
#include <string>

namespace noonsim {

// Base for every error raised by the engine. The CLI maps ValidationError
// and IoError to exit code 1 and NumericalError subclasses to 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments: dimension mismatches, out-of-range slots, malformed configs.
class ValidationError : public Error {
public:
    using Error::Error;
};

// File system failures while reading configs or writing reports.
class IoError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

// A state could not be represented in (or escaped) the truncated Fock space.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// A forced measurement outcome, or a post-selected state, has zero weight.
class ImpossibleBranchError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace noonsim
