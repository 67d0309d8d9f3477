#include <benchmark/benchmark.h>

#include <random>

#include "pyramid/orderbook.hpp"
#include "pyramid/population.hpp"
#include "pyramid/strategy.hpp"

namespace {

using namespace pyramid;

// A ladder of `levels` unit asks above 100, swept by one market buy.
void BM_BookSweep(benchmark::State& state) {
  const auto levels = state.range(0);
  for (auto _ : state) {
    state.PauseTiming();
    Book book(100.0);
    for (std::int64_t i = 0; i < levels; ++i)
      book.place_limit(i, Side::kSell, 100.0 + 0.001 * static_cast<double>(i + 1), 1);
    state.ResumeTiming();
    benchmark::DoNotOptimize(book.execute_market(kMainFund, Side::kBuy, levels));
  }
  state.SetItemsProcessed(state.iterations() * levels);
}
BENCHMARK(BM_BookSweep)->Arg(1 << 10)->Arg(1 << 14);

void BM_BookInsert(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(0.001, 0.1);
  for (auto _ : state) {
    Book book(100.0);
    for (int i = 0; i < 20'000; ++i) book.place_limit(i, Side::kSell, 100.0 * (1.0 + rate(rng)), 1);
    benchmark::DoNotOptimize(book.depth(Side::kSell));
  }
  state.SetItemsProcessed(state.iterations() * 20'000);
}
BENCHMARK(BM_BookInsert);

void BM_BuildPopulation(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(build_population({default_tiers(), 0.4, {}, ++seed}));
}
BENCHMARK(BM_BuildPopulation)->Unit(benchmark::kMillisecond);

// One full single-plan run, population excluded.
void BM_SingleRun(benchmark::State& state) {
  const auto pop = build_population({default_tiers(), 0.4, {}, 7});
  MarketOptions options;
  options.record_fills = false;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_single_strategy(pop, state.range(0), ++seed, options).r_mf);
}
BENCHMARK(BM_SingleRun)->Arg(50)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BatchRunWithTpSl(benchmark::State& state) {
  const auto pop = build_population(
      {default_tiers(), 0.4, TpSlRegime::uniform(TpSlSpec::equal(0.02, 0.08)), 7});
  MarketOptions options;
  options.record_fills = false;
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(run_batch_strategy(pop, 2000, 5, 5, ++seed, options).r_mf);
}
BENCHMARK(BM_BatchRunWithTpSl)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
