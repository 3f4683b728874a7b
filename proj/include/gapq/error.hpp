#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gapq {

/// Machine-readable failure category; the CLI maps each one to an exit code.
enum class ErrorCategory { config, model, unstable, numerical };

constexpr std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::model: return "model";
    case ErrorCategory::unstable: return "unstable";
    case ErrorCategory::numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

/// Invalid model parameters (non-generator Q, bad pmf, negative durations...).
struct ModelError : Error {
  explicit ModelError(const std::string& what) : Error(ErrorCategory::model, what) {}
};

/// Offered load at or beyond the supported stability margin.
struct UnstableError : Error {
  UnstableError(const std::string& what, double rho)
      : Error(ErrorCategory::unstable, what), rho(rho) {}
  double rho;
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

}  // namespace gapq
