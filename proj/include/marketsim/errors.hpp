#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace marketsim {

// Input data violates a documented invariant (bad scenario file, bad manifest).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A clearing or bi-level solve failed to produce a usable solution.
// Carries the first offending period (1-based) when one can be identified.
class SolveError : public std::runtime_error {
 public:
  explicit SolveError(const std::string& what, std::optional<int> period = std::nullopt)
      : std::runtime_error(what), period_(period) {}

  std::optional<int> period() const { return period_; }

 private:
  std::optional<int> period_;
};

// Filesystem failures while reading inputs or writing result artifacts.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace marketsim
