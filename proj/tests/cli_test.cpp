// Runs the hdqual executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "hdqual/dataset_io.hpp"
#include "hdqual/projection.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int exit_code;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hdqual_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const auto out = dir_ / "stdout.txt";
    const auto err = dir_ / "stderr.txt";
    const std::string cmd = std::string(HDQUAL_CLI_PATH) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, hdqual::read_text_file(out),
            hdqual::read_text_file(err)};
  }

  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  std::string bytes(const std::string& rel) const { return hdqual::read_text_file(dir_ / rel); }

  fs::path dir_;
};

void expect_error_line(const Result& r, int exit_code, const std::string& code) {
  EXPECT_EQ(r.exit_code, exit_code) << r.err;
  static const std::regex line(R"(hdqual: error\[([a-z_]+)\]: [^\n]+\n)");
  std::smatch m;
  ASSERT_TRUE(std::regex_match(r.err, m, line)) << r.err;
  EXPECT_EQ(m[1], code);
}

TEST_F(Cli, SynthDefaultsAreBalancedAndValid) {
  const auto r = run("synth --out " + path("data"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("18 parts (low 6, average 6, high 6)"), std::string::npos);
  const auto files = hdqual::read_dataset(path("data"));
  EXPECT_EQ(files.recordings.size(), 18u);
  EXPECT_EQ(files.recordings.front().channels.size(), 8u);
  EXPECT_EQ(files.recordings.front().length(), 2000u);
  EXPECT_TRUE(fs::exists(dir_ / "data" / "run_config.conf"));
}

TEST_F(Cli, SynthSeedIsByteReproducibleAndNoiselessPartsRepeat) {
  ASSERT_EQ(run("synth --length 300 --seed 9 --out " + path("a")).exit_code, 0);
  ASSERT_EQ(run("synth --length 300 --seed 9 --out " + path("b")).exit_code, 0);
  ASSERT_EQ(run("synth --length 300 --seed 10 --out " + path("c")).exit_code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    const auto name = e.path().filename().string();
    if (name == "run_config.conf") continue;  // records the output path
    EXPECT_EQ(bytes("a/" + name), bytes("b/" + name)) << name;
    ++files;
  }
  EXPECT_EQ(files, 19u);
  EXPECT_NE(bytes("a/part-000_counterbore.csv"), bytes("c/part-000_counterbore.csv"));

  ASSERT_EQ(run("synth --length 300 --noise 0 --out " + path("q")).exit_code, 0);
  const auto h = [&](int part) {
    char name[64];
    std::snprintf(name, sizeof name, "q/part-%03d_counterbore.csv", part);
    return std::hash<std::string>{}(bytes(name));
  };
  // Parts 0-5 are low, 6-11 average, 12-17 high.
  for (int p = 1; p < 6; ++p) {
    EXPECT_EQ(h(p), h(0));
    EXPECT_EQ(h(6 + p), h(6));
    EXPECT_EQ(h(12 + p), h(12));
  }
  EXPECT_NE(h(0), h(6));
  EXPECT_NE(h(6), h(12));
}

TEST_F(Cli, TrainReferenceConfigIsAccurateAndDeterministic) {
  ASSERT_EQ(run("synth --out " + path("data")).exit_code, 0);
  const auto r1 = run("train --data " + path("data") + " --out " + path("run1"));
  ASSERT_EQ(r1.exit_code, 0) << r1.err;
  for (const char* f : {"model.hdq", "preprocess.json", "metrics.json", "energy.json",
                        "run_config.conf"}) {
    EXPECT_TRUE(fs::exists(dir_ / "run1" / f)) << f;
  }
  const std::string metrics = bytes("run1/metrics.json");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(metrics, m, std::regex(R"("accuracy": ([0-9.eE+-]+))")));
  EXPECT_GE(std::stod(m[1]), 0.9);
  EXPECT_NE(bytes("run1/energy.json").find("CPU-side estimate"), std::string::npos);

  const auto r2 = run("train --data " + path("data") + " --out " + path("run2"));
  ASSERT_EQ(r2.exit_code, 0);
  EXPECT_EQ(bytes("run2/metrics.json"), metrics);
  EXPECT_EQ(bytes("run2/model.hdq"), bytes("run1/model.hdq"));
  EXPECT_EQ(bytes("run2/preprocess.json"), bytes("run1/preprocess.json"));
}

TEST_F(Cli, ConfigFileFlagsWinAndCopiedConfigReproducesTheRun) {
  {
    std::ofstream cfg(dir_ / "run.conf");
    cfg << "# small run\nlength = 500\ndim = 1000\nseed = 4\nout = " << path("unused") << "\n";
  }
  const auto r = run("train --config " + path("run.conf") + " --dim 1500 --out " + path("a"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string copied = bytes("a/run_config.conf");
  EXPECT_NE(copied.find("dim = 1500"), std::string::npos);
  EXPECT_NE(copied.find("length = 500"), std::string::npos);
  EXPECT_NE(copied.find("seed = 4"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "unused"));

  const auto again = run("train --config " + path("a/run_config.conf") + " --out " + path("b"));
  ASSERT_EQ(again.exit_code, 0) << again.err;
  EXPECT_EQ(bytes("b/metrics.json"), bytes("a/metrics.json"));
  EXPECT_EQ(bytes("b/model.hdq"), bytes("a/model.hdq"));
}

TEST_F(Cli, PredictClassifiesEveryWindow) {
  ASSERT_EQ(run("synth --length 400 --out " + path("data")).exit_code, 0);
  ASSERT_EQ(run("train --data " + path("data") + " --dim 2000 --out " + path("run")).exit_code, 0);
  const auto r = run("predict --model " + path("run/model.hdq") + " --data " + path("data") +
                     " --evaluate --out " + path("pred"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string csv = bytes("pred/predictions.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 18 * 8);
  EXPECT_EQ(csv.rfind("part_id,feature_id,window,predicted,sim_low,sim_average,sim_high\n", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "pred" / "metrics.json"));

  const auto single = run("predict --model " + path("run/model.hdq") + " --csv " +
                          path("data/part-000_counterbore.csv"));
  ASSERT_EQ(single.exit_code, 0) << single.err;
  EXPECT_EQ(std::count(single.out.begin(), single.out.end(), '\n'), 1 + 8);
}

TEST_F(Cli, BenchWritesJsonLines) {
  const auto r = run("bench --length 400 --dim 1000 --mlp-epochs 5 --reps 2 --out " +
                     path("bench"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const std::string jsonl = bytes("bench/bench.jsonl");
  // 3 workloads x 2 reps, 3 summaries, comparison, 2 models, config.
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 6 + 3 + 1 + 2 + 1);
  EXPECT_NE(jsonl.find("\"warmup_excluded\":true"), std::string::npos);
  EXPECT_NE(r.out.find("not comparable to GPU-board"), std::string::npos);
}

TEST_F(Cli, ProjectReproducesTheFleetScenario) {
  const auto r = run("project --scenario " HDQUAL_SCENARIO_DIR "/cnc_fleet_2030.json --out " +
                     path("proj"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("3.564000e+13 J"), std::string::npos);
  EXPECT_NE(r.out.find("9.900000e+06 kWh"), std::string::npos);
  EXPECT_NE(r.out.find("6930 t"), std::string::npos);
  EXPECT_NE(bytes("proj/savings.json").find("\"savings_j\": 35640000000000.0"), std::string::npos);

  const auto flags = run("project --candidate-ei 0.1 --baseline-ei 10 --co2-factor 0.7");
  ASSERT_EQ(flags.exit_code, 0);
  EXPECT_NE(flags.out.find("3.564000e+13 J"), std::string::npos);
}

TEST_F(Cli, ErrorsAreSingleLinesWithExitCodes) {
  const auto missing = run("train --data " + path("nowhere") + " --out " + path("x"));
  expect_error_line(missing, 3, "io");
  EXPECT_NE(missing.err.find(path("nowhere")), std::string::npos);

  expect_error_line(run("train --dim abc --out " + path("x")), 2, "config");
  expect_error_line(run("frobnicate"), 2, "config");
  expect_error_line(run("train --out " + path("x") + " --power platform --power-counter " +
                        path("no_rapl")),
                    4, "capability_unavailable");
  {
    std::ofstream(dir_ / "bad.conf") << "dimension = 3\n";
  }
  expect_error_line(run("train --config " + path("bad.conf") + " --out " + path("x")), 2,
                    "config");
  {
    std::ofstream(dir_ / "bad.json")
        << R"({"candidate": {"energy_per_inference_j": 1}, "baseline": {"energy_per_inference_j": 2, "machnes": 1}})";
  }
  const auto schema = run("project --scenario " + path("bad.json"));
  expect_error_line(schema, 3, "schema");
  EXPECT_NE(schema.err.find("baseline.machnes"), std::string::npos);
  expect_error_line(run("project --candidate-ei 1"), 2, "config");
  expect_error_line(run("train --window 5000 --out " + path("x")), 3, "window_too_long");
}

}  // namespace
