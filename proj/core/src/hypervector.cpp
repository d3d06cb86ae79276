#include "hdqual/hypervector.hpp"

#include <cmath>
#include <string>

#include "hdqual/error.hpp"

namespace hdqual {

namespace {

void require_finite(std::span<const hv_scalar> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::invalid_input,
                  "hypervector entry " + std::to_string(i) + " is not finite");
    }
  }
}

void require_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch, "hypervector dimensions differ: " +
                                                   std::to_string(a) + " vs " +
                                                   std::to_string(b));
  }
}

}  // namespace

Hypervector::Hypervector(std::vector<hv_scalar> values) : values_(std::move(values)) {
  require_finite(values_);
}

namespace {

template <typename T>
double dot_impl(std::span<const T> a, std::span<const T> b) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const std::size_t n = a.size();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  return dot_impl(a, b);
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return dot_impl(a, b);
}

double Hypervector::norm() const noexcept {
  return std::sqrt(hdqual::dot(values_, values_));
}

double Hypervector::dot(const Hypervector& other) const {
  require_same_dim(dim(), other.dim());
  return hdqual::dot(values_, other.values_);
}

void Hypervector::add_scaled(const Hypervector& other, double coeff) {
  require_same_dim(dim(), other.dim());
  if (!std::isfinite(coeff)) {
    throw Error(ErrorCode::invalid_input, "non-finite update coefficient");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] = static_cast<hv_scalar>(values_[i] + coeff * other.values_[i]);
  }
  require_finite(values_);
}

void Hypervector::scale(double factor) {
  if (!std::isfinite(factor)) {
    throw Error(ErrorCode::invalid_input, "non-finite scale factor");
  }
  for (auto& v : values_) v = static_cast<hv_scalar>(v * factor);
  require_finite(values_);
}

}  // namespace hdqual
