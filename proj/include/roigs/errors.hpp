#pragma once

#include <stdexcept>
#include <string>

namespace roigs {

/// Base class for all toolkit failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes or text (truncated stream, bad header, bad syntax).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that violates a semantic contract
/// (dangling reference, degenerate ROI, dimension mismatch, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Caller misuse of a command-line or configuration surface.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace roigs
