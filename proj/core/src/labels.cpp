#include "hdqual/labels.hpp"

#include <string>

#include "hdqual/error.hpp"

namespace hdqual {

std::string_view to_string(Quality q) noexcept {
  switch (q) {
    case Quality::low: return "low";
    case Quality::average: return "average";
    case Quality::high: return "high";
  }
  return "?";
}

Quality parse_quality(std::string_view text) {
  for (Quality q : kQualities) {
    if (to_string(q) == text) return q;
  }
  throw Error(ErrorCode::invalid_argument, "unknown label '" + std::string(text) + "'");
}

}  // namespace hdqual
