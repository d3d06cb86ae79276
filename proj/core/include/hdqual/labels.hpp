#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace hdqual {

/// Geometric-deviation category. The numeric order is the fixed label order
/// used for tie-breaking, confusion-matrix rows and file encodings.
enum class Quality : std::uint8_t { low = 0, average = 1, high = 2 };

inline constexpr std::size_t kQualityCount = 3;
inline constexpr std::array<Quality, kQualityCount> kQualities = {
    Quality::low, Quality::average, Quality::high};

constexpr std::size_t index_of(Quality q) noexcept { return static_cast<std::size_t>(q); }

std::string_view to_string(Quality q) noexcept;
/// Throws invalid_argument for anything but "low", "average", "high".
Quality parse_quality(std::string_view text);

}  // namespace hdqual
