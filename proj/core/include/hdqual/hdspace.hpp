#pragma once

// Random-projection encoding into the hyperspace.
//
// An Encoder owns m basis hypervectors B_1..B_m of length D (together the
// D x m matrix B) with i.i.d. standard normal entries and, for the nonlinear
// mode, D phase offsets drawn uniformly from [0, 2*pi).
//
//   linear:     F   = B x = sum_i x_i B_i
//   nonlinear:  F_d = cos((B x)_d + phase_d)
//
// Basis vectors are not orthogonalized; at D ~ 1e4 independent Gaussian
// vectors are already nearly orthogonal (|cos| ~ 1/sqrt(D)). Storage is one
// contiguous block per basis vector, so encoding is m scaled additions.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hdqual/hypervector.hpp"

namespace hdqual {

/// Concatenated windowed channel samples; length m.
using FeatureVector = std::vector<double>;

enum class EncoderMode : std::uint8_t { linear = 0, nonlinear = 1 };

std::string_view to_string(EncoderMode mode) noexcept;
/// Accepts "linear" or "nonlinear"; throws invalid_argument otherwise.
EncoderMode parse_encoder_mode(std::string_view text);

/// Immutable after construction; safe to share across threads.
class Encoder {
 public:
  /// Builds an encoder from explicit parts. `basis` is the D x m matrix in
  /// row-major order, i.e. basis[d * m + i] = (B_i)_d.
  /// Intended for tests and for tools that need a hand-chosen basis.
  static Encoder from_parts(std::size_t dim, std::size_t input_size,
                            std::vector<hv_scalar> basis, std::vector<hv_scalar> phases,
                            EncoderMode mode, std::uint64_t seed = 0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t input_size() const noexcept { return input_size_; }
  std::uint64_t seed() const noexcept { return seed_; }
  EncoderMode mode() const noexcept { return mode_; }

  /// All basis entries, basis vector after basis vector (m blocks of D).
  std::span<const hv_scalar> basis() const noexcept { return basis_; }
  /// B_i, i < m; length D.
  std::span<const hv_scalar> basis_vector(std::size_t i) const noexcept {
    return std::span<const hv_scalar>(basis_).subspan(i * dim_, dim_);
  }
  hv_scalar basis_entry(std::size_t d, std::size_t i) const noexcept {
    return basis_[i * dim_ + d];
  }
  std::span<const hv_scalar> phases() const noexcept { return phases_; }

  /// Digest of dimensions, mode, seed, basis and phases. Models store it so
  /// they can refuse hypervectors from a different encoder.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  friend Encoder generate_basis(std::size_t, std::size_t, std::uint64_t, EncoderMode);

  // `basis` in storage order (m blocks of D).
  Encoder(std::size_t dim, std::size_t input_size, std::vector<hv_scalar> basis,
          std::vector<hv_scalar> phases, EncoderMode mode, std::uint64_t seed);

  std::size_t dim_ = 0;
  std::size_t input_size_ = 0;
  std::vector<hv_scalar> basis_;
  std::vector<hv_scalar> phases_;
  EncoderMode mode_ = EncoderMode::nonlinear;
  std::uint64_t seed_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Seeded basis generation. Basis and phases use the "basis" and "phase"
/// streams of `seed`, so the result is a pure function of the arguments.
Encoder generate_basis(std::size_t input_size, std::size_t dim, std::uint64_t seed,
                       EncoderMode mode = EncoderMode::nonlinear);

/// B x accumulated in double precision, before the mode nonlinearity and before rounding
/// to hv_scalar.
std::vector<double> project(const Encoder& enc, std::span<const double> x);

Hypervector encode(const Encoder& enc, std::span<const double> x);

/// Encodes every sample; work is split over `threads` workers. Output order
/// matches input order and does not depend on the thread count.
std::vector<Hypervector> encode_batch(const Encoder& enc,
                                      std::span<const FeatureVector> samples,
                                      unsigned threads = 1);

/// Cosine similarity. Throws zero_norm if either argument has zero norm and
/// dimension_mismatch on unequal lengths.
double similarity(std::span<const float> a, std::span<const float> b);
double similarity(std::span<const double> a, std::span<const double> b);
double similarity(const Hypervector& a, const Hypervector& b);

}  // namespace hdqual
