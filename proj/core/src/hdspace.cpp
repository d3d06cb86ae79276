#include "hdqual/hdspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

#include "hdqual/error.hpp"
#include "hdqual/random.hpp"

namespace hdqual {

namespace {

std::uint64_t hash_words(std::uint64_t h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::size_t i = 0;
  for (; i + 8 <= bytes; i += 8) {
    std::uint64_t w;
    std::memcpy(&w, p + i, 8);
    h ^= w;
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  for (; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
std::uint64_t hash_value(std::uint64_t h, T v) {
  return hash_words(h, &v, sizeof v);
}

}  // namespace

std::string_view to_string(EncoderMode mode) noexcept {
  return mode == EncoderMode::linear ? "linear" : "nonlinear";
}

EncoderMode parse_encoder_mode(std::string_view text) {
  if (text == "linear") return EncoderMode::linear;
  if (text == "nonlinear") return EncoderMode::nonlinear;
  throw Error(ErrorCode::invalid_argument,
              "unknown encoder mode '" + std::string(text) + "'");
}

Encoder::Encoder(std::size_t dim, std::size_t input_size, std::vector<hv_scalar> basis,
                 std::vector<hv_scalar> phases, EncoderMode mode, std::uint64_t seed)
    : dim_(dim),
      input_size_(input_size),
      basis_(std::move(basis)),
      phases_(std::move(phases)),
      mode_(mode),
      seed_(seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = hash_value(h, static_cast<std::uint64_t>(dim_));
  h = hash_value(h, static_cast<std::uint64_t>(input_size_));
  h = hash_value(h, static_cast<std::uint64_t>(mode_));
  h = hash_value(h, seed_);
  h = hash_words(h, basis_.data(), basis_.size() * sizeof(hv_scalar));
  h = hash_words(h, phases_.data(), phases_.size() * sizeof(hv_scalar));
  fingerprint_ = h;
}

Encoder Encoder::from_parts(std::size_t dim, std::size_t input_size,
                            std::vector<hv_scalar> basis, std::vector<hv_scalar> phases,
                            EncoderMode mode, std::uint64_t seed) {
  if (dim == 0 || input_size == 0) {
    throw Error(ErrorCode::invalid_argument, "encoder dimensions must be positive");
  }
  if (basis.size() != dim * input_size) {
    throw Error(ErrorCode::dimension_mismatch,
                "basis has " + std::to_string(basis.size()) + " entries, expected " +
                    std::to_string(dim * input_size));
  }
  if (phases.size() != dim) {
    throw Error(ErrorCode::dimension_mismatch,
                "phase vector has " + std::to_string(phases.size()) +
                    " entries, expected " + std::to_string(dim));
  }
  const auto finite = [](hv_scalar v) { return std::isfinite(v); };
  if (!std::all_of(basis.begin(), basis.end(), finite) ||
      !std::all_of(phases.begin(), phases.end(), finite)) {
    throw Error(ErrorCode::invalid_input, "encoder parts contain non-finite values");
  }
  std::vector<hv_scalar> stored(basis.size());
  for (std::size_t d = 0; d < dim; ++d) {
    for (std::size_t i = 0; i < input_size; ++i) stored[i * dim + d] = basis[d * input_size + i];
  }
  return Encoder(dim, input_size, std::move(stored), std::move(phases), mode, seed);
}

Encoder generate_basis(std::size_t input_size, std::size_t dim, std::uint64_t seed,
                       EncoderMode mode) {
  if (dim == 0 || input_size == 0) {
    throw Error(ErrorCode::invalid_argument, "encoder dimensions must be positive");
  }
  std::vector<hv_scalar> basis(dim * input_size);
  Rng basis_rng(derive_seed(seed, "basis"));
  for (auto& b : basis) b = static_cast<hv_scalar>(basis_rng.normal());

  std::vector<hv_scalar> phases(dim);
  Rng phase_rng(derive_seed(seed, "phase"));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (auto& p : phases) {
    // Rounding to float can land exactly on 2*pi; fold it back to 0.
    auto v = static_cast<hv_scalar>(two_pi * phase_rng.uniform());
    p = v >= static_cast<hv_scalar>(two_pi) ? hv_scalar{0} : v;
  }
  return Encoder(dim, input_size, std::move(basis), std::move(phases), mode, seed);
}

namespace {

void check_input(const Encoder& enc, std::span<const double> x) {
  if (x.size() != enc.input_size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "feature vector has length " + std::to_string(x.size()) +
                    ", encoder expects " + std::to_string(enc.input_size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw Error(ErrorCode::invalid_input,
                  "feature entry " + std::to_string(i) + " is not finite");
    }
  }
}

// acc = B x, summed over basis vectors in index order.
void accumulate(const Encoder& enc, std::span<const double> x, std::vector<double>& acc) {
  acc.assign(enc.dim(), 0.0);
  double* out = acc.data();
  const std::size_t dim = enc.dim();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    const hv_scalar* b = enc.basis_vector(i).data();
    for (std::size_t d = 0; d < dim; ++d) out[d] += xi * b[d];
  }
}

Hypervector finish(const Encoder& enc, const double* acc) {
  std::vector<hv_scalar> out(enc.dim());
  if (enc.mode() == EncoderMode::linear) {
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = static_cast<hv_scalar>(acc[d]);
  } else {
    const auto phases = enc.phases();
    for (std::size_t d = 0; d < out.size(); ++d) {
      out[d] = static_cast<hv_scalar>(std::cos(acc[d] + phases[d]));
    }
  }
  return Hypervector(std::move(out));
}

Hypervector encode_unchecked(const Encoder& enc, std::span<const double> x) {
  thread_local std::vector<double> acc;
  accumulate(enc, x, acc);
  return finish(enc, acc.data());
}

}  // namespace

std::vector<double> project(const Encoder& enc, std::span<const double> x) {
  check_input(enc, x);
  std::vector<double> out;
  accumulate(enc, x, out);
  return out;
}

Hypervector encode(const Encoder& enc, std::span<const double> x) {
  check_input(enc, x);
  return encode_unchecked(enc, x);
}

std::vector<Hypervector> encode_batch(const Encoder& enc,
                                      std::span<const FeatureVector> samples,
                                      unsigned threads) {
  for (const auto& s : samples) check_input(enc, s);
  std::vector<Hypervector> out(samples.size());
  const std::size_t workers =
      std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(samples.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = encode_unchecked(enc, samples[i]);
    return out;
  }
  std::vector<std::exception_ptr> failures(workers);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < samples.size(); i += workers) {
            out[i] = encode_unchecked(enc, samples[i]);
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

namespace {

template <typename T>
double cosine(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::dimension_mismatch, "similarity of vectors with lengths " +
                                                   std::to_string(a.size()) + " and " +
                                                   std::to_string(b.size()));
  }
  const double na = dot(a, a);
  const double nb = dot(b, b);
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::zero_norm, "cosine similarity with a zero-norm vector");
  }
  const double s = dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

}  // namespace

double similarity(std::span<const float> a, std::span<const float> b) { return cosine(a, b); }

double similarity(std::span<const double> a, std::span<const double> b) { return cosine(a, b); }

double similarity(const Hypervector& a, const Hypervector& b) {
  return similarity(a.values(), b.values());
}

}  // namespace hdqual
