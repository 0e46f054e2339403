#pragma once

#include <stdexcept>
#include <string>

namespace tabebm {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Problems with user-supplied data or schemas. The CLI maps these to exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// A parameter outside its documented domain.
class InvalidArgument : public DataError {
public:
    using DataError::DataError;
};

class FileError : public DataError {
public:
    using DataError::DataError;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class SchemaMismatch : public DataError {
public:
    using DataError::DataError;
};

class LabelError : public DataError {
public:
    using DataError::DataError;
};

class EmptyColumnError : public DataError {
public:
    using DataError::DataError;
};

class StratificationError : public DataError {
public:
    using DataError::DataError;
};

class ClassOutOfRange : public DataError {
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

class EmptyClassError : public DataError {
public:
    using DataError::DataError;
};

class EmptyRequest : public DataError {
public:
    using DataError::DataError;
};

class DegenerateTable : public DataError {
public:
    using DataError::DataError;
};

/// Numerical failures during training or sampling (exit code 3).
class TrainingDivergence : public Error {
public:
    using Error::Error;
};

class NonFiniteState : public Error {
public:
    using Error::Error;
};

/// Bad command line or config file (exit code 1).
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public UsageError {
public:
    using UsageError::UsageError;
};

}  // namespace tabebm
