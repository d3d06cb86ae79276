#include "hdqual/dataset_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include "hdqual/error.hpp"

namespace hdqual {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hdqual_dsio_" + name);
  fs::remove_all(dir);
  return dir;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an hdqual::Error";
  return ErrorCode::config;
}

TEST(DatasetIo, RoundTripsSyntheticDataExactly) {
  SynthConfig cfg;
  cfg.length = 120;
  cfg.channels = 3;
  cfg.parts_per_class = 2;
  cfg.seed = 11;
  const auto data = gen_synthetic(cfg);
  const auto dir = fresh_dir("roundtrip");
  write_dataset(dir, {data.recordings, data.deviations_mm});
  EXPECT_TRUE(fs::exists(dir / kManifestName));
  EXPECT_TRUE(fs::exists(dir / "part-000_counterbore.csv"));

  for (const fs::path& p : {dir, dir / kManifestName}) {
    const auto back = read_dataset(p);
    EXPECT_EQ(back.deviations_mm, data.deviations_mm);
    ASSERT_EQ(back.recordings.size(), data.recordings.size());
    for (std::size_t i = 0; i < back.recordings.size(); ++i) {
      const auto& a = back.recordings[i];
      const auto& b = data.recordings[i];
      EXPECT_EQ(a.part_id, b.part_id);
      EXPECT_EQ(a.feature_id, b.feature_id);
      EXPECT_EQ(a.sample_rate_hz, b.sample_rate_hz);
      ASSERT_EQ(a.channels.size(), b.channels.size());
      for (std::size_t c = 0; c < a.channels.size(); ++c) {
        EXPECT_EQ(a.channels[c].name, b.channels[c].name);
        EXPECT_EQ(a.channels[c].samples, b.channels[c].samples);
      }
    }
  }
  fs::remove_all(dir);
}

TEST(DatasetIo, CsvParsing) {
  const auto rec = recording_from_csv("time,a,b\r\n0,1.5,2\n0.002, -3 ,4e-1\n\n", 500.0);
  ASSERT_EQ(rec.channels.size(), 2u);
  EXPECT_EQ(rec.channels[0].name, "a");
  EXPECT_EQ(rec.channels[0].samples, (std::vector<double>{1.5, -3.0}));
  EXPECT_EQ(rec.channels[1].samples, (std::vector<double>{2.0, 0.4}));

  EXPECT_EQ(code_of([] { recording_from_csv("t,a\n0,1\n", 1.0); }), ErrorCode::invalid_input);
  EXPECT_EQ(code_of([] { recording_from_csv("time,a\n0,1,2\n", 1.0); }),
            ErrorCode::invalid_input);
  EXPECT_EQ(code_of([] { recording_from_csv("time,a\n0,abc\n", 1.0); }),
            ErrorCode::invalid_input);
  EXPECT_EQ(code_of([] { recording_from_csv("time,a\n0,nan\n", 1.0); }),
            ErrorCode::invalid_input);
  EXPECT_EQ(code_of([] { recording_from_csv("", 1.0); }), ErrorCode::invalid_input);
}

TEST(DatasetIo, ManifestErrors) {
  const auto dir = fresh_dir("bad");
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::io);
  fs::create_directories(dir);
  write_text_file(dir / kManifestName, "{not json");
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::schema);
  write_text_file(dir / kManifestName, R"({"sample_rate_hz": 500, "channels": ["a"]})");
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::schema);
  write_text_file(dir / kManifestName,
                  R"({"sample_rate_hz": 500, "channels": ["a"], "parts": [
                       {"part_id": "p", "feature_id": "f", "file": "p.csv", "deviation_mm": 0.1}]})");
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::io);
  write_text_file(dir / "p.csv", "time,b\n0,1\n");
  EXPECT_EQ(code_of([&] { read_dataset(dir); }), ErrorCode::schema);
  write_text_file(dir / "p.csv", "time,a\n0,1\n");
  EXPECT_EQ(read_dataset(dir).recordings.at(0).channels.at(0).samples,
            (std::vector<double>{1.0}));
  fs::remove_all(dir);
}

TEST(DatasetIo, PreprocessRoundTrip) {
  Preprocess p;
  p.window.n = 7;
  p.channel_names = {"x", "y"};
  p.scaler = FeatureScaler(2, 7, {0.1, -2.5}, {1.0 / 3.0, 4.0}, true);
  const auto back = preprocess_from_json(preprocess_to_json(p));
  EXPECT_EQ(back.window.n, 7u);
  EXPECT_EQ(back.channel_names, p.channel_names);
  EXPECT_EQ(back.scaler.means(), p.scaler.means());
  EXPECT_EQ(back.scaler.stds(), p.scaler.stds());
  EXPECT_TRUE(back.scaler.unit_norm());
  EXPECT_EQ(code_of([] { preprocess_from_json(R"({"window": 3})"); }), ErrorCode::schema);
}

TEST(DatasetIo, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -1e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

}  // namespace
}  // namespace hdqual
