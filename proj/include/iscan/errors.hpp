#pragma once

#include <stdexcept>
#include <string>

namespace iscan {

// A directed graph fed to topological_sort contained a cycle.
struct CycleError : std::runtime_error {
  explicit CycleError(const std::string& msg) : std::runtime_error(msg) {}
};

// Linear system stayed non-SPD even after the ridge retry.
struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& msg) : std::runtime_error(msg) {}
};

// Produced or received a NaN/inf where a finite value is required.
struct NonFiniteError : std::runtime_error {
  explicit NonFiniteError(const std::string& msg) : std::runtime_error(msg) {}
};

// Ratio statistic whose denominator is identically zero (e.g. codec on a
// constant target). Distinct from invalid input so callers can treat it as
// "no information" rather than a usage bug.
struct DegenerateDenominatorError : std::runtime_error {
  explicit DegenerateDenominatorError(const std::string& msg) : std::runtime_error(msg) {}
};

// Design matrix for a regression is rank deficient.
struct RankDeficientError : std::runtime_error {
  explicit RankDeficientError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace iscan
