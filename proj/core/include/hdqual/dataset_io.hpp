#pragma once

// On-disk datasets: a directory holding manifest.json plus one CSV per
// part/feature recording. See docs/data_format.md for the schemas.

#include <filesystem>
#include <string>
#include <vector>

#include "hdqual/pipeline.hpp"

namespace hdqual {

inline constexpr const char* kManifestName = "manifest.json";

struct DatasetFiles {
  std::vector<Recording> recordings;
  std::vector<double> deviations_mm;
};

/// Writes manifest.json and <part_id>_<feature_id>.csv files into `dir`,
/// creating it if needed. All recordings must share channel names and
/// sample rate.
void write_dataset(const std::filesystem::path& dir, const DatasetFiles& data);

/// Accepts either the dataset directory or the manifest path itself.
DatasetFiles read_dataset(const std::filesystem::path& dir_or_manifest);

/// One recording as CSV text: header "time,<ch...>", then one row per sample.
std::string recording_to_csv(const Recording& rec);
/// Parses CSV text; channel names come from the header.
Recording recording_from_csv(const std::string& text, double sample_rate_hz);

/// Preprocessing state a trained model depends on.
struct Preprocess {
  WindowSpec window;
  std::vector<std::string> channel_names;
  FeatureScaler scaler;
};

std::string preprocess_to_json(const Preprocess& p);
Preprocess preprocess_from_json(const std::string& text);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace hdqual
