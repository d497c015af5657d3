#pragma once

#include <stdexcept>
#include <string>

namespace phnet {

// Base for every recoverable library error. The CLI maps these to exit 2;
// only a diverged training run maps to exit 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand shapes or lengths do not line up.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Cholesky pivot collapsed; the matrix is not positive definite.
// The LM loop reacts by raising the damping factor.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

// Column set or parameter name does not match the active schema.
class SchemaMismatch : public Error {
public:
    using Error::Error;
};

// A cell or file could not be parsed; message carries row/column context.
class ParseError : public Error {
public:
    using Error::Error;
};

// A value is outside its admissible range (e.g. pH outside 0-14).
class RangeError : public Error {
public:
    using Error::Error;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class EmptyInput : public Error {
public:
    using Error::Error;
};

// Fewer than 4 samples; a 70/30 split is not meaningful.
class TooFewSamples : public Error {
public:
    using Error::Error;
};

// Invalid configuration value (counts, factors, profile bounds).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A statistic is undefined because a series has zero variance.
class DegenerateVariance : public Error {
public:
    using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace phnet
