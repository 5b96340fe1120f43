#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sundman {

// Evaluation hit a point outside a function's domain (ln of a nonpositive
// value, fractional power of a negative base, division by zero, overflow).
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& what, std::size_t offset, std::string expected)
      : std::runtime_error(what), offset(offset), expected(std::move(expected)) {}
  std::size_t offset;
  std::string expected;
};

struct NotSecondOrder : std::runtime_error {
  explicit NotSecondOrder(const std::string& what) : std::runtime_error(what) {}
};

struct NotQuadraticInDerivative : std::runtime_error {
  explicit NotQuadraticInDerivative(const std::string& what) : std::runtime_error(what) {}
};

// target_coeffs found a coefficient that varies over the sampling box.
struct NonConstantTarget : std::runtime_error {
  NonConstantTarget(const std::string& what, std::string which, double wx, double wy, double wval)
      : std::runtime_error(what), which(std::move(which)), x(wx), y(wy), value(wval) {}
  std::string which;
  double x, y, value;
};

struct NoBracket : std::runtime_error {
  explicit NoBracket(const std::string& what) : std::runtime_error(what) {}
};

struct InversionFailure : std::runtime_error {
  explicit InversionFailure(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sundman
