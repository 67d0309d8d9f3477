#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "pyramid/errors.hpp"
#include "pyramid/experiment.hpp"

namespace pyramid {

std::vector<RunCoordinate> enumerate_runs(const SweepConfig& config) {
  std::vector<RunCoordinate> runs;
  auto push = [&](double ratio, Quantity n, int d_buy, int d_sell) {
    for (std::int64_t rep = 0; rep < config.repetitions; ++rep) {
      RunCoordinate c;
      c.run_index = static_cast<std::int64_t>(runs.size());
      c.ratio = ratio;
      c.n_mf = n;
      c.d_buy = d_buy;
      c.d_sell = d_sell;
      c.repetition = rep;
      c.child_seed = derive_child_seed(config.master_seed, static_cast<std::uint64_t>(c.run_index));
      runs.push_back(c);
    }
  };
  for (double ratio : config.ratios) {
    if (config.plan == PlanKind::kSingle) {
      for (Quantity n : config.n_mf) push(ratio, n, 1, 1);
    } else {
      for (int b : config.d_buy)
        for (int s : config.d_sell) push(ratio, config.total_shares, b, s);
    }
  }
  return runs;
}

MainFundPlan plan_for(const SweepConfig& config, const RunCoordinate& coord) {
  return config.plan == PlanKind::kSingle
             ? MainFundPlan::single(coord.n_mf)
             : MainFundPlan::batch(coord.n_mf, coord.d_buy, coord.d_sell);
}

RunRecord execute_run(const SweepConfig& config, const RunCoordinate& coord,
                      const std::function<void(std::int64_t, const Fill&)>& on_fill) {
  RunRecord record;
  record.coord = coord;

  const auto population = build_population(config.population(coord.ratio, coord.child_seed));
  MarketOptions options;
  options.initial_price = config.initial_price;
  options.wave_cap = config.wave_cap;
  options.record_fills = false;
  options.on_fill = on_fill;

  try {
    const auto outcome =
        run_plan(population, plan_for(config, coord), splitmix64(coord.child_seed), options);
    record.r_mf = outcome.r_mf;
    record.m_buy = outcome.m_buy;
    record.m_sell = outcome.m_sell;
    for (const auto& period : outcome.period_results) {
      record.closing_prices.push_back(period.closing_price);
      record.total_cascade += period.trend_triggered();
    }
  } catch (const BookExhausted&) {
    record.status = RunStatus::kBookExhausted;
  }
  return record;
}

std::vector<RunRecord> run_sweep(const SweepConfig& config, std::size_t workers,
                                 const ProgressFn& progress) {
  config.validate();
  const auto runs = enumerate_runs(config);
  std::vector<RunRecord> records(runs.size());

  if (workers == 0) workers = config.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(runs.size(), 1));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mutex;

  auto work = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        records[i] = execute_run(config, runs[i]);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      const std::size_t finished = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard lock(mutex);
        progress(finished, runs.size());
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return records;
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string csv_header() {
  return "run_index,ratio,regime,plan,n_mf,d_buy,d_sell,repetition,child_seed,status,"
         "r_mf,m_buy,m_sell,profit,closing_prices,total_cascade";
}

void write_csv_row(std::ostream& out, const SweepConfig& config, const RunRecord& r) {
  const auto& c = r.coord;
  out << c.run_index << ',' << format_double(c.ratio) << ',' << config.tp_sl.label() << ','
      << (config.plan == PlanKind::kSingle ? "single" : "batch") << ',' << c.n_mf << ','
      << c.d_buy << ',' << c.d_sell << ',' << c.repetition << ',' << c.child_seed << ',';
  if (r.status == RunStatus::kBookExhausted) {
    out << "book_exhausted,,,,,,\n";
    return;
  }
  out << "ok," << format_double(r.r_mf) << ',' << format_double(r.m_buy) << ','
      << format_double(r.m_sell) << ',' << format_double(r.m_sell - r.m_buy) << ',';
  for (std::size_t i = 0; i < r.closing_prices.size(); ++i)
    out << (i ? ";" : "") << format_double(r.closing_prices[i]);
  out << ',' << r.total_cascade << '\n';
}

void write_csv(std::ostream& out, const SweepConfig& config,
               const std::vector<RunRecord>& records) {
  out << csv_header() << '\n';
  for (const auto& r : records) write_csv_row(out, config, r);
}

}  // namespace pyramid
