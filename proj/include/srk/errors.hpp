#pragma once

#include <stdexcept>
#include <string>

namespace srk {

/// An argument is outside the documented domain of an operation.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand shapes do not agree (matrix rows vs. measurement length, etc.).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The input carries no usable information, e.g. an all-zero matrix.
class DegenerateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace srk
