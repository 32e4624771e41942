#pragma once

#include <stdexcept>
#include <string>

namespace oad {

// Caller broke a documented precondition (shapes, ranges, versions).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

// Arithmetic left its valid domain (log of non-positive, NaN/Inf).
class NumericDomainError : public std::domain_error {
 public:
  explicit NumericDomainError(const std::string& what) : std::domain_error(what) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace oad
