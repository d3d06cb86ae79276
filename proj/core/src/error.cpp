#include "hdqual/error.hpp"

namespace hdqual {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_input: return "invalid_input";
    case ErrorCode::zero_norm: return "zero_norm";
    case ErrorCode::empty_dataset: return "empty_dataset";
    case ErrorCode::unknown_class: return "unknown_class";
    case ErrorCode::window_too_long: return "window_too_long";
    case ErrorCode::degenerate_distribution: return "degenerate_distribution";
    case ErrorCode::empty_class: return "empty_class";
    case ErrorCode::stratification: return "stratification";
    case ErrorCode::model_encoder_mismatch: return "model_encoder_mismatch";
    case ErrorCode::capability_unavailable: return "capability_unavailable";
    case ErrorCode::insufficient_samples: return "insufficient_samples";
    case ErrorCode::io: return "io";
    case ErrorCode::schema: return "schema";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

}  // namespace hdqual
