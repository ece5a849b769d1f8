#pragma once

#include <stdexcept>
#include <string>

namespace hmclab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested size exceeds what an operation supports, or input is too short.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Grid too coarse for the requested band limit.
class ResolutionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration rejected; the message names the offending key.
class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hmclab
