#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mqed {

// Base for all library errors; `code` is a stable machine-readable tag that
// the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& msg)
      : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Invalid or inconsistent user input.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& code, const std::string& msg)
      : Error(code, msg) {}
  ValidationError(std::vector<std::string> violations)
      : Error("ConfigInvalid", join(violations)),
        violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) {
      if (!s.empty()) s += "; ";
      s += x;
    }
    return s;
  }
  std::vector<std::string> violations_;
};

// Numerical failure (quadrature, solver, discretization).
class NumericalError : public Error {
 public:
  NumericalError(const std::string& code, const std::string& msg)
      : Error(code, msg) {}
};

}  // namespace mqed
