#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace hdqual {

#ifdef HDQUAL_HV_DOUBLE
using hv_scalar = double;
#else
using hv_scalar = float;
#endif

/// Dense real hypervector. The dimension is fixed at construction; every
/// mutation keeps all entries finite or throws.
class Hypervector {
 public:
  Hypervector() = default;
  explicit Hypervector(std::size_t dim) : values_(dim, hv_scalar{0}) {}
  /// Throws invalid_input if any entry is NaN or infinite.
  explicit Hypervector(std::vector<hv_scalar> values);

  std::size_t dim() const noexcept { return values_.size(); }
  hv_scalar operator[](std::size_t i) const noexcept { return values_[i]; }
  std::span<const hv_scalar> values() const noexcept { return values_; }

  /// Euclidean norm, accumulated in double.
  double norm() const noexcept;
  double dot(const Hypervector& other) const;

  /// this += coeff * other. Bundling is add_scaled with coeff = 1.
  void add_scaled(const Hypervector& other, double coeff);
  Hypervector& operator+=(const Hypervector& other) {
    add_scaled(other, 1.0);
    return *this;
  }
  /// Multiplies every entry by `factor`.
  void scale(double factor);

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::vector<hv_scalar> values_;
};

/// Dot product of two equal-length spans, accumulated in double.
double dot(std::span<const float> a, std::span<const float> b) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace hdqual
