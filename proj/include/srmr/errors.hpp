#pragma once

#include <stdexcept>
#include <string>

namespace srmr {

/// Bad argument or degenerate input (maps to CLI exit 2).
struct InvalidParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The requested model cannot be fit to this data, e.g. K > N/(p+2)
/// (maps to CLI exit 3).
struct InfeasibleModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inputs that should describe the same rows do not (maps to CLI exit 4).
struct DataMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Every random start failed; carries per-start diagnostics
/// (maps to CLI exit 5).
struct FitFailedError : std::runtime_error {
  explicit FitFailedError(const std::string& what, std::string diag = {})
      : std::runtime_error(what), diagnostics(std::move(diag)) {}
  std::string diagnostics;
};

/// File parse failure; message carries the 1-based line number.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A metric has no value on this input (e.g. fewer than two rows).
struct UndefinedMetricError : InvalidParameterError {
  using InvalidParameterError::InvalidParameterError;
};

/// Rejection sampling exhausted its proposal budget; the configured lines
/// leave (almost) no acceptance region.
struct GenerationStuckError : InvalidParameterError {
  using InvalidParameterError::InvalidParameterError;
};

}  // namespace srmr
