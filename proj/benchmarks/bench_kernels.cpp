#include <benchmark/benchmark.h>

#include <cmath>
#include <string>
#include <vector>

#include "tsrate/forecast.hpp"
#include "tsrate/imaging.hpp"
#include "tsrate/metrics.hpp"
#include "tsrate/rating.hpp"
#include "tsrate/rng.hpp"
#include "tsrate/stats.hpp"

namespace {

std::vector<double> walk(std::size_t n, std::uint64_t seed) {
  std::vector<double> v(n);
  double x = 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    x += tsrate::rng::uniform(seed, i) - 0.5;
    v[i] = x;
  }
  return v;
}

void BM_Cwt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = walk(n, 1);
  const auto scales = tsrate::default_scales(n);
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::cwt(x, scales));
}
BENCHMARK(BM_Cwt)->Arg(80)->Arg(256);

void BM_SpectrogramImage(benchmark::State& state) {
  const auto x = walk(80, 2);
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::spectrogram_image(x));
}
BENCHMARK(BM_SpectrogramImage);

void BM_ComposeImage(benchmark::State& state) {
  const auto x = walk(80, 3);
  const auto spec = tsrate::cwt(x, tsrate::default_scales(80));
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::compose_image(spec, x));
}
BENCHMARK(BM_ComposeImage);

void BM_AssignRating(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<tsrate::ScoredModel> scores;
  for (std::size_t i = 0; i < n; ++i) {
    scores.push_back({"m" + std::to_string(i), std::floor(tsrate::rng::uniform(4, i) * 20)});
  }
  const auto po = tsrate::create_partial_order(scores, tsrate::Perturbation::P0);
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::assign_rating(po, 3));
}
BENCHMARK(BM_AssignRating)->Arg(11)->Arg(1000);

void BM_PsmMatch(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::string> cat(n);
  std::vector<bool> treated(n);
  for (std::size_t i = 0; i < n; ++i) {
    cat[i] = std::string(1, static_cast<char>('a' + i % 6));
    treated[i] = tsrate::rng::uniform(5, i) < 0.3 + 0.05 * static_cast<double>(i % 6);
  }
  const auto ps = tsrate::propensity(cat, treated);
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::psm_match(ps.score, treated, ps.matchable, cat));
}
BENCHMARK(BM_PsmMatch)->Arg(1000)->Arg(10000);

void BM_Wrs(benchmark::State& state) {
  std::vector<tsrate::NamedSample> groups;
  for (std::size_t g = 0; g < 6; ++g) groups.push_back({"g" + std::to_string(g), walk(160, 10 + g)});
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::wrs(groups));
}
BENCHMARK(BM_Wrs);

void BM_ArForecast(benchmark::State& state) {
  const auto x = walk(80, 6);
  for (auto _ : state) benchmark::DoNotOptimize(tsrate::ar_forecast(x, 20, 5, 1));
}
BENCHMARK(BM_ArForecast);

}  // namespace

BENCHMARK_MAIN();
