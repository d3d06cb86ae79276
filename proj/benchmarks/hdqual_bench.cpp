#include <benchmark/benchmark.h>

#include <vector>

#include "hdqual/baseline.hpp"
#include "hdqual/hdspace.hpp"
#include "hdqual/model.hpp"
#include "hdqual/pipeline.hpp"
#include "hdqual/random.hpp"

using namespace hdqual;

namespace {

// 8 channels x 50-sample windows, as in the reference configuration.
constexpr std::size_t kInput = 400;

std::vector<FeatureVector> random_features(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureVector> out(n, FeatureVector(kInput));
  for (auto& x : out) {
    for (auto& v : x) v = rng.normal() / 20.0;
  }
  return out;
}

const PreparedData& reference_data() {
  static const PreparedData data = [] {
    SynthConfig cfg;
    cfg.seed = 1;
    const auto synth = gen_synthetic(cfg);
    return prepare_dataset(synth.recordings, synth.deviations_mm, {50}, 0.8, 1);
  }();
  return data;
}

}  // namespace

static void BM_Encode(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const Encoder enc = generate_basis(kInput, dim, 1);
  const auto x = random_features(1, 2).front();
  for (auto _ : state) benchmark::DoNotOptimize(encode(enc, x));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Encode)->Arg(1000)->Arg(10000);

static void BM_EncodeBatch(benchmark::State& state) {
  const Encoder enc = generate_basis(kInput, 10000, 1);
  const auto xs = random_features(64, 3);
  for (auto _ : state) benchmark::DoNotOptimize(encode_batch(enc, xs, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_EncodeBatch)->Unit(benchmark::kMillisecond);

static void BM_Similarity(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Rng rng(4);
  std::vector<hv_scalar> a(dim), b(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    a[i] = static_cast<hv_scalar>(rng.normal());
    b[i] = static_cast<hv_scalar>(rng.normal());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(similarity(std::span<const hv_scalar>(a), std::span<const hv_scalar>(b)));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * dim * sizeof(hv_scalar)));
}
BENCHMARK(BM_Similarity)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_RetrainEpoch(benchmark::State& state) {
  const auto& data = reference_data();
  const Encoder enc = generate_basis(data.train.feature_length(), 10000, 1);
  const auto hvs = encode_batch(enc, data.train.samples);
  std::vector<EncodedSample> encoded;
  for (std::size_t i = 0; i < hvs.size(); ++i) encoded.push_back({hvs[i], data.train.labels[i]});
  const ClassModel bundled = bundle_classes(encoded, 0.05, enc.fingerprint());
  for (auto _ : state) {
    state.PauseTiming();
    ClassModel m = bundled;
    state.ResumeTiming();
    benchmark::DoNotOptimize(retrain_epoch(m, encoded));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(encoded.size()));
}
BENCHMARK(BM_RetrainEpoch)->Unit(benchmark::kMillisecond);

static void BM_MlpEpoch(benchmark::State& state) {
  const auto& data = reference_data();
  MlpTrainConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(mlp_fit(data.train, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.train.size()));
}
BENCHMARK(BM_MlpEpoch)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
