#include "hdqual/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hdqual/error.hpp"

namespace hdqual {

namespace {

constexpr std::array<char, 8> kMagic = {'H', 'D', 'Q', 'M', 'O', 'D', 'E', 'L'};

template <typename UInt>
void put_le(std::ostream& out, UInt v) {
  std::array<char, sizeof(UInt)> bytes;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
  std::array<unsigned char, sizeof(UInt)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::schema, "model file is truncated");
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_model(std::ostream& out, const EncoderSpec& encoder, const ClassModel& model) {
  if (encoder.dim != model.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "encoder and model dimensions differ");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(encoder.mode));
  put_le<std::uint64_t>(out, encoder.dim);
  put_le<std::uint64_t>(out, encoder.input_size);
  put_le<std::uint64_t>(out, encoder.seed);
  put_le<std::uint64_t>(out, model.encoder_fingerprint());
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(model.learning_rate()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.labels().size()));
  for (Quality q : model.labels()) put_le<std::uint8_t>(out, static_cast<std::uint8_t>(q));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(model.epoch_log().size()));
  for (std::size_t n : model.epoch_log()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (const auto& c : model.classes()) {
    for (hv_scalar v : c.values()) {
      put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (!out) throw Error(ErrorCode::io, "failed writing model");
}

ModelFile read_model(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::schema, "not an hdqual model file");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::schema,
                "unsupported model format version " + std::to_string(version));
  }
  const auto mode = get_le<std::uint32_t>(in);
  if (mode > 1) throw Error(ErrorCode::schema, "invalid encoder mode in model file");

  EncoderSpec spec;
  spec.mode = static_cast<EncoderMode>(mode);
  spec.dim = get_le<std::uint64_t>(in);
  spec.input_size = get_le<std::uint64_t>(in);
  spec.seed = get_le<std::uint64_t>(in);
  const auto fingerprint = get_le<std::uint64_t>(in);
  const double eta = std::bit_cast<double>(get_le<std::uint64_t>(in));

  const auto label_count = get_le<std::uint32_t>(in);
  if (label_count == 0 || label_count > kQualityCount) {
    throw Error(ErrorCode::schema, "invalid label count in model file");
  }
  std::vector<Quality> labels;
  for (std::uint32_t i = 0; i < label_count; ++i) {
    const auto raw = get_le<std::uint8_t>(in);
    if (raw >= kQualityCount) throw Error(ErrorCode::schema, "invalid label in model file");
    labels.push_back(static_cast<Quality>(raw));
  }
  const auto epochs = get_le<std::uint32_t>(in);
  std::vector<std::size_t> log(epochs);
  for (auto& n : log) n = get_le<std::uint32_t>(in);

  if (spec.dim == 0 || spec.dim > (std::uint64_t{1} << 32)) {
    throw Error(ErrorCode::schema, "invalid dimension in model file");
  }
  std::vector<Hypervector> classes;
  for (std::uint32_t k = 0; k < label_count; ++k) {
    std::vector<hv_scalar> values(spec.dim);
    for (auto& v : values) v = std::bit_cast<float>(get_le<std::uint32_t>(in));
    classes.emplace_back(std::move(values));
  }

  ClassModel model(std::move(labels), std::move(classes), eta, fingerprint);
  model.set_epoch_log(std::move(log));
  return ModelFile{spec, std::move(model)};
}

void save_model(const std::filesystem::path& path, const EncoderSpec& encoder,
                const ClassModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  write_model(out, encoder, model);
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open model file '" + path.string() + "'");
  return read_model(in);
}

}  // namespace hdqual
