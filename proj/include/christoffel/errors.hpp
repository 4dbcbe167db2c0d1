#pragma once

#include <stdexcept>
#include <string>

namespace christoffel {

// Argument and precondition violations are reported as std::invalid_argument.
// The two classes below cover the remaining failure families.

/// File could not be opened, read, written, or parsed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// An eigensolver or iterative continuation failed to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace christoffel
