// File: include/reldiv/error.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace reldiv {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

/// A document could not be parsed (malformed JSON, bad field type).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A parsed value violates a schema or catalog invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A record references an entity that does not exist (e.g. unknown item id).
class ReferenceError : public Error {
public:
    using Error::Error;
};

/// An operation argument is outside its documented domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A stream that must be timestamp-ordered is not.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// Threshold calibration had no computable diversity values to average.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// A numeric attribute has fewer than two distinct values, so no usable range.
class DegenerateRangeError : public Error {
public:
    using Error::Error;
};

/// No attribute-subset family satisfying the type-split constraints was found
/// within the retry budget.
class InfeasibleSplitError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read, or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace reldiv
