#pragma once

// Binary model files. Layout (all integers and floats little-endian):
//
//   offset  size   field
//   0       8      magic "HDQMODEL"
//   8       4      u32 format version (currently 1)
//   12      4      u32 encoder mode (0 linear, 1 nonlinear)
//   16      8      u64 D
//   24      8      u64 m (encoder input length)
//   32      8      u64 encoder seed
//   40      8      u64 encoder fingerprint
//   48      8      f64 learning rate
//   56      4      u32 label count K
//   60      K      u8 labels (0 low, 1 average, 2 high), ascending
//   60+K    4      u32 epoch count E
//   64+K    4E     u32 mispredicts per epoch
//   ...     4KD    K class hypervectors, D f32 each, in label order
//
// Hypervectors are always stored as f32, also in HDQUAL_HV_DOUBLE builds.
// See docs/model_format.md.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hdqual/hdspace.hpp"
#include "hdqual/model.hpp"

namespace hdqual {

inline constexpr std::uint32_t kModelFormatVersion = 1;

/// Everything needed to regenerate the encoder a model was trained with.
struct EncoderSpec {
  std::size_t input_size = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  EncoderMode mode = EncoderMode::nonlinear;

  static EncoderSpec of(const Encoder& enc) {
    return {enc.input_size(), enc.dim(), enc.seed(), enc.mode()};
  }
  Encoder build() const { return generate_basis(input_size, dim, seed, mode); }
};

struct ModelFile {
  EncoderSpec encoder;
  ClassModel model;
};

void write_model(std::ostream& out, const EncoderSpec& encoder, const ClassModel& model);
ModelFile read_model(std::istream& in);

void save_model(const std::filesystem::path& path, const EncoderSpec& encoder,
                const ClassModel& model);
/// Throws io on unreadable files and schema on malformed contents.
ModelFile load_model(const std::filesystem::path& path);

}  // namespace hdqual
