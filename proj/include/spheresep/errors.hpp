#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spheresep {

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An input violated a documented precondition (non-orthogonal matrix,
/// non-simple spectrum, non-integrable tensor, ...).
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A nullspace had the wrong dimension or no clear singular-value gap.
/// Carries the full singular spectrum so the case can be audited.
struct RankError : std::runtime_error {
  RankError(const std::string& what, std::vector<double> spectrum)
      : std::runtime_error(what), singular_values(std::move(spectrum)) {}
  std::vector<double> singular_values;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace spheresep
