#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdqual {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  invalid_input,
  zero_norm,
  empty_dataset,
  unknown_class,
  window_too_long,
  degenerate_distribution,
  empty_class,
  stratification,
  model_encoder_mismatch,
  capability_unavailable,
  insufficient_samples,
  io,
  schema,
  config,
};

/// Stable snake_case identifier, used as the machine-parseable part of CLI errors.
std::string_view to_string(ErrorCode code) noexcept;

/// All library failures surface as this exception type; `code()` says which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hdqual
