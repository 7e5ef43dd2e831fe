#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include <semfield/corpus.hpp>
#include <semfield/doc_vectors.hpp>
#include <semfield/sem_field.hpp>
#include <semfield/stat_tests.hpp>
#include <semfield/synth_channel.hpp>

#include "test_support.hpp"

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

semfield::CorpusStratum source_stratum(std::size_t words) {
  const auto map = testing::concept_map();
  std::map<std::string, double> budget;
  for (const auto& [id, c] : map.concepts()) budget[id] = 1.0;
  return semfield::generate_source(map, words, budget, 7);
}

void BM_Tokenize(benchmark::State& state) {
  const std::string text = read_text(testing::fixture("corpus/summit_en_1000.txt"));
  const auto profile = semfield::english_profile();
  for (auto _ : state) benchmark::DoNotOptimize(semfield::tokenize(text, profile));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_Tokenize);

void BM_StudentizedRangeCdf(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(semfield::studentized_range_cdf(3.5, k, 30.0));
}
BENCHMARK(BM_StudentizedRangeCdf)->Arg(3)->Arg(10);

void BM_StudentizedRangeQuantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(semfield::studentized_range_quantile(0.95, 4, 36.0));
}
BENCHMARK(BM_StudentizedRangeQuantile);

void BM_VariantCounts(benchmark::State& state) {
  const auto map = testing::concept_map();
  const auto stratum = source_stratum(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(semfield::variant_counts(stratum, map, semfield::MapSide::source));
}
BENCHMARK(BM_VariantCounts)->Arg(10'000)->Arg(100'000);

void BM_Pca2d(benchmark::State& state) {
  const auto map = testing::concept_map();
  std::map<std::string, double> budget;
  for (const auto& [id, c] : map.concepts()) budget[id] = 1.0;
  std::vector<semfield::ConceptVector> vectors;
  for (std::uint64_t seed = 1; seed <= static_cast<std::uint64_t>(state.range(0)); ++seed) {
    auto s = semfield::generate_source(map, 5000, budget, seed);
    auto v = semfield::concept_vector(s, map, semfield::MapSide::source);
    v.stratum_label = "s" + std::to_string(seed);
    vectors.push_back(std::move(v));
  }
  for (auto _ : state) benchmark::DoNotOptimize(semfield::pca_2d(vectors));
}
BENCHMARK(BM_Pca2d)->Arg(6)->Arg(24);

void BM_ApplyChannel(benchmark::State& state) {
  const auto map = testing::concept_map();
  const auto source = source_stratum(50'000);
  const auto params = semfield::ChannelParams::human_defaults(3);
  for (auto _ : state) benchmark::DoNotOptimize(semfield::apply_channel(source, map, params));
}
BENCHMARK(BM_ApplyChannel);

}  // namespace

BENCHMARK_MAIN();
