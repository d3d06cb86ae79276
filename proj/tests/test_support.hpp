#pragma once

// Test-only helpers. Random data here comes from std::mt19937_64 so that the
// fixtures do not share a code path with the library's own generator.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "hdqual/hypervector.hpp"

namespace hdqual::testing {

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n,
                                         double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(gen);
  return v;
}

inline Hypervector random_hv(std::mt19937_64& gen, std::size_t dim) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<hv_scalar> v(dim);
  for (auto& x : v) x = static_cast<hv_scalar>(dist(gen));
  return Hypervector(std::move(v));
}

inline std::vector<double> to_double(std::span<const hv_scalar> v) {
  return std::vector<double>(v.begin(), v.end());
}

/// ||a - b|| / ||b||, straightforward double loops.
inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

/// Textbook cosine with plain double loops.
inline double naive_cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace hdqual::testing
