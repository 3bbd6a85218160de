#pragma once

#include <stdexcept>
#include <string>

namespace sdtl {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Tensor or layer dimensions disagree.
struct ShapeError : Error {
  explicit ShapeError(const std::string& what) : Error(what) {}
};

// Invalid argument value (bad config, label out of range, ...).
struct ParameterError : Error {
  explicit ParameterError(const std::string& what) : Error(what) {}
};

// A forward trace and the parameters it is replayed against do not match.
struct ConsistencyError : Error {
  explicit ConsistencyError(const std::string& what) : Error(what) {}
};

// Malformed or unsupported file contents.
struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error(what) {}
};

// File system failures (missing input, unwritable output).
struct IoError : Error {
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace sdtl
