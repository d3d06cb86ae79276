#include "hdqual/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hdqual/error.hpp"
#include "json.hpp"

namespace hdqual {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw Error(ErrorCode::io, "failed writing '" + path.string() + "'");
}

std::string recording_to_csv(const Recording& rec) {
  rec.validate();
  std::string out = "time";
  for (const auto& ch : rec.channels) out += "," + ch.name;
  out += '\n';
  for (std::size_t i = 0; i < rec.length(); ++i) {
    out += format_double(static_cast<double>(i) / rec.sample_rate_hz);
    for (const auto& ch : rec.channels) {
      out += ',';
      out += format_double(ch.samples[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_double(std::string_view field, std::size_t line_no) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::invalid_input, "line " + std::to_string(line_no) +
                                              ": invalid number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

Recording recording_from_csv(const std::string& text, double sample_rate_hz) {
  Recording rec;
  rec.sample_rate_hz = sample_rate_hz;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (rec.channels.empty()) {
      if (fields.size() < 2 || fields[0] != "time") {
        throw Error(ErrorCode::invalid_input,
                    "CSV header must be 'time,<channel>,...' with at least one channel");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        rec.channels.push_back({std::string(fields[i]), {}});
      }
      continue;
    }
    if (fields.size() != rec.channels.size() + 1) {
      throw Error(ErrorCode::invalid_input, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(rec.channels.size() + 1) +
                                                " fields, got " + std::to_string(fields.size()));
    }
    parse_double(fields[0], line_no);
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      rec.channels[c].samples.push_back(parse_double(fields[c + 1], line_no));
    }
  }
  if (rec.channels.empty()) throw Error(ErrorCode::invalid_input, "CSV has no header");
  return rec;
}

void write_dataset(const fs::path& dir, const DatasetFiles& data) {
  if (data.recordings.empty() || data.recordings.size() != data.deviations_mm.size()) {
    throw Error(ErrorCode::invalid_argument, "need one deviation per recording");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());

  const auto& first = data.recordings.front();
  json channels = json::array();
  for (const auto& ch : first.channels) channels.push_back(ch.name);

  json parts = json::array();
  for (std::size_t i = 0; i < data.recordings.size(); ++i) {
    const auto& rec = data.recordings[i];
    if (rec.sample_rate_hz != first.sample_rate_hz ||
        rec.channels.size() != first.channels.size()) {
      throw Error(ErrorCode::invalid_argument, "recordings must share channels and sample rate");
    }
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      if (rec.channels[c].name != first.channels[c].name) {
        throw Error(ErrorCode::invalid_argument, "recordings must share channel names");
      }
    }
    const std::string file = rec.part_id + "_" + rec.feature_id + ".csv";
    write_text_file(dir / file, recording_to_csv(rec));
    parts.push_back({{"part_id", rec.part_id},
                     {"feature_id", rec.feature_id},
                     {"file", file},
                     {"deviation_mm", data.deviations_mm[i]}});
  }
  json manifest = {{"format", "hdqual.manifest"},
                   {"version", 1},
                   {"sample_rate_hz", first.sample_rate_hz},
                   {"channels", channels},
                   {"parts", parts}};
  write_text_file(dir / kManifestName, manifest.dump(2) + "\n");
}

namespace {

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::schema, where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::schema, where + ": field '" + key + "' has the wrong type");
  }
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, where + ": " + e.what());
  }
}

}  // namespace

DatasetFiles read_dataset(const fs::path& dir_or_manifest) {
  fs::path manifest_path = dir_or_manifest;
  if (fs::is_directory(manifest_path)) manifest_path /= kManifestName;
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::io, "manifest not found: '" + manifest_path.string() + "'");
  }
  const fs::path dir = manifest_path.parent_path();
  const std::string where = manifest_path.string();
  const json manifest = parse_json(read_text_file(manifest_path), where);

  const auto rate = field<double>(manifest, "sample_rate_hz", where);
  if (!(rate > 0.0)) throw Error(ErrorCode::schema, where + ": sample_rate_hz must be positive");
  const auto channels = field<std::vector<std::string>>(manifest, "channels", where);
  if (channels.empty()) throw Error(ErrorCode::schema, where + ": 'channels' is empty");
  if (!manifest.contains("parts") || !manifest["parts"].is_array() ||
      manifest["parts"].empty()) {
    throw Error(ErrorCode::schema, where + ": 'parts' must be a non-empty array");
  }

  DatasetFiles out;
  for (const auto& part : manifest["parts"]) {
    const auto file = field<std::string>(part, "file", where);
    Recording rec = recording_from_csv(read_text_file(dir / file), rate);
    rec.part_id = field<std::string>(part, "part_id", where);
    rec.feature_id = field<std::string>(part, "feature_id", where);
    if (rec.channels.size() != channels.size()) {
      throw Error(ErrorCode::schema, file + ": channel count differs from manifest");
    }
    for (std::size_t c = 0; c < channels.size(); ++c) {
      if (rec.channels[c].name != channels[c]) {
        throw Error(ErrorCode::schema, file + ": channel '" + rec.channels[c].name +
                                           "' does not match manifest '" + channels[c] + "'");
      }
    }
    rec.validate();
    out.deviations_mm.push_back(field<double>(part, "deviation_mm", where));
    out.recordings.push_back(std::move(rec));
  }
  return out;
}

std::string preprocess_to_json(const Preprocess& p) {
  json j = {{"format", "hdqual.preprocess"},
            {"version", 1},
            {"window", p.window.n},
            {"channels", p.channel_names},
            {"channel_means", p.scaler.means()},
            {"channel_stds", p.scaler.stds()},
            {"unit_norm", p.scaler.unit_norm()}};
  return j.dump(2) + "\n";
}

Preprocess preprocess_from_json(const std::string& text) {
  const std::string where = "preprocess";
  const json j = parse_json(text, where);
  Preprocess p;
  p.window.n = field<std::size_t>(j, "window", where);
  p.channel_names = field<std::vector<std::string>>(j, "channels", where);
  try {
    p.scaler = FeatureScaler(p.channel_names.size(), p.window.n,
                             field<std::vector<double>>(j, "channel_means", where),
                             field<std::vector<double>>(j, "channel_stds", where),
                             field<bool>(j, "unit_norm", where));
  } catch (const Error& e) {
    throw Error(ErrorCode::schema, where + ": " + e.what());
  }
  return p;
}

}  // namespace hdqual
