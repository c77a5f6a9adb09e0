#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace seqdetect {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed arguments (lengths, empty inputs, inconsistent sizes).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// The fixed-sample-size search exceeded its hard cap.
class InfeasibleError : public DomainError {
public:
    InfeasibleError(const std::string& what, std::int64_t cap) : DomainError(what), cap_(cap) {}
    std::int64_t cap() const noexcept { return cap_; }

private:
    std::int64_t cap_;
};

class NoRootError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Ratio statistic with a zero-energy denominator.
class DegenerateInputError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Expected LLR increment is zero, so Wald's ASN is undefined.
class SingularAsnError : public DomainError {
public:
    using DomainError::DomainError;
};

/// The drift points away from the boundary a truncated run must reach.
class PredictionUndefinedError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An increment stream ran dry before the SPRT reached a decision.
class StreamExhaustedError : public Error {
public:
    using Error::Error;
};

class EstimationFailedError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text or unknown configuration key.
class ConfigError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace seqdetect
