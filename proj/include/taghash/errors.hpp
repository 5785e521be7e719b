#pragma once

#include <stdexcept>
#include <string>

namespace taghash {

// Errors fall into three families; the CLI maps each family to an exit code
// (config -> 2, data -> 3, numerical -> 4).

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InvalidSplit : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class InvalidK : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class MalformedFile : public DataError {
public:
    using DataError::DataError;
};

class DimensionMismatch : public DataError {
public:
    using DataError::DataError;
};

class LengthMismatch : public DataError {
public:
    using DataError::DataError;
};

class InvalidSign : public DataError {
public:
    using DataError::DataError;
};

class EmptyIndex : public DataError {
public:
    using DataError::DataError;
};

class SingularSystem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateAnchor : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace taghash
