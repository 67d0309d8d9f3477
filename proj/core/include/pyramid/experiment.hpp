#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pyramid/population.hpp"
#include "pyramid/rng.hpp"
#include "pyramid/strategy.hpp"

namespace pyramid {

// Parsed experiment file. Every key is documented in configs/README.md;
// unknown sections and keys are rejected.
struct SweepConfig {
  std::vector<TierSpec> tiers = default_tiers();
  std::vector<double> ratios{0.4};
  std::optional<double> p_active;  // overrides every tier when set
  TpSlRegime tp_sl;
  double initial_price = 100.0;

  PlanKind plan = PlanKind::kSingle;
  std::vector<Quantity> n_mf{2000};
  Quantity total_shares = 2000;
  std::vector<int> d_buy{1};
  std::vector<int> d_sell{1};

  std::int64_t repetitions = 50;
  std::uint64_t master_seed = 0;
  std::string output_path = "results.csv";
  std::size_t workers = 0;  // 0: hardware concurrency
  std::size_t wave_cap = 10'000;

  void validate() const;
  std::vector<TierSpec> effective_tiers() const;
  PopulationConfig population(double ratio, std::uint64_t seed) const;
};

// Throws ConfigError naming `source` on syntax errors, unknown keys and
// invalid values.
SweepConfig parse_config(std::istream& in, const std::string& source = "<config>");
SweepConfig load_config(const std::filesystem::path& path);

// Comma separated list, or geometric:LO:HI:COUNT for COUNT log-spaced
// integers between LO and HI (duplicates after rounding removed).
std::vector<Quantity> parse_size_list(const std::string& text);

struct RunCoordinate {
  std::int64_t run_index = 0;
  double ratio = 0.0;
  Quantity n_mf = 0;  // total shares for batch plans
  int d_buy = 1;
  int d_sell = 1;
  std::int64_t repetition = 0;
  std::uint64_t child_seed = 0;
};

enum class RunStatus : std::uint8_t { kOk, kBookExhausted };

struct RunRecord {
  RunCoordinate coord;
  RunStatus status = RunStatus::kOk;
  double r_mf = 0.0;
  double m_buy = 0.0;
  double m_sell = 0.0;
  std::vector<double> closing_prices;
  std::int64_t total_cascade = 0;
};

// Canonical task order: ratio, then plan coordinate (n_mf, or d_buy then
// d_sell), then repetition. run_index numbers that order from 0.
std::vector<RunCoordinate> enumerate_runs(const SweepConfig& config);

MainFundPlan plan_for(const SweepConfig& config, const RunCoordinate& coord);

// One run: fresh population and market seeded from the child seed.
// BookExhausted becomes a status; other errors propagate. `on_fill`, when
// set, sees every fill of the run.
RunRecord execute_run(const SweepConfig& config, const RunCoordinate& coord,
                      const std::function<void(std::int64_t, const Fill&)>& on_fill = {});

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

// Runs every task on `workers` threads (0: config.workers, then hardware
// concurrency). Records come back in canonical order regardless of worker count.
std::vector<RunRecord> run_sweep(const SweepConfig& config, std::size_t workers = 0,
                                 const ProgressFn& progress = {});

std::string csv_header();
void write_csv_row(std::ostream& out, const SweepConfig& config, const RunRecord& record);
void write_csv(std::ostream& out, const SweepConfig& config, const std::vector<RunRecord>& records);
// %.17g: round-trips every double.
std::string format_double(double value);

}  // namespace pyramid
