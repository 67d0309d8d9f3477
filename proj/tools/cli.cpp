#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "pyramid/errors.hpp"
#include "pyramid/experiment.hpp"

namespace pyramid::cli {
namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> reps;
  std::string out_path;
  std::size_t workers = 0;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Experiment config file");
  cmd->add_option("--seed", flags.seed, "Master seed (overrides the config file)");
  cmd->add_option("--reps", flags.reps, "Repetitions per grid point")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out_path, "Output CSV path");
  cmd->add_option("--workers", flags.workers, "Worker threads (0: all cores)");
  cmd->add_flag("--verbose,-v", flags.verbose, "Progress and fill trace output");
}

SweepConfig resolve(const CommonFlags& flags) {
  SweepConfig cfg = flags.config_path.empty() ? SweepConfig{} : load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.reps) cfg.repetitions = *flags.reps;
  if (!flags.out_path.empty()) cfg.output_path = flags.out_path;
  if (flags.workers) cfg.workers = flags.workers;
  cfg.validate();
  return cfg;
}

std::string owner_label(OwnerId owner) {
  return owner == kMainFund ? std::string("mf") : std::to_string(owner);
}

void print_fill(std::ostream& out, std::int64_t period, const Fill& fill) {
  out << "fill period=" << period << " seq=" << fill.seq << " buyer=" << owner_label(fill.buy_owner)
      << " seller=" << owner_label(fill.sell_owner) << " price=" << format_double(fill.price)
      << " size=" << fill.size << '\n';
}

int sweep(const CommonFlags& flags, PlanKind expected, const char* name, std::ostream& out,
          std::ostream& err) {
  const SweepConfig cfg = resolve(flags);
  if (cfg.plan != expected)
    throw ConfigError(std::string(name) + " needs a [plan] kind = " +
                      (expected == PlanKind::kSingle ? "single" : "batch") + " config");

  std::ofstream file(cfg.output_path, std::ios::binary);
  if (!file) throw ConfigError("cannot write '" + cfg.output_path + "'");

  ProgressFn progress;
  if (flags.verbose) {
    progress = [&err](std::size_t done, std::size_t total) {
      if (done == total || done % 100 == 0) err << "\r" << done << "/" << total << std::flush;
    };
  }
  const auto records = run_sweep(cfg, cfg.workers, progress);
  if (flags.verbose) err << '\n';

  write_csv(file, cfg, records);

  std::size_t exhausted = 0;
  for (const auto& r : records) exhausted += r.status == RunStatus::kBookExhausted;
  out << "wrote " << records.size() << " runs to " << cfg.output_path;
  if (exhausted) out << " (" << exhausted << " book_exhausted)";
  out << '\n';
  return kOk;
}

int single_run(const CommonFlags& flags, std::ostream& out) {
  const SweepConfig cfg = resolve(flags);
  const RunRecord record = execute_run(cfg, enumerate_runs(cfg).front(),
                                       [&out](std::int64_t period, const Fill& fill) {
                                         print_fill(out, period, fill);
                                       });
  out << csv_header() << '\n';
  write_csv_row(out, cfg, record);
  return kOk;
}

double relative_error(double sim, double theory) {
  if (sim == theory) return 0.0;
  return std::abs(sim - theory) / std::max(std::abs(theory), 1e-300);
}

int theory_check(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  SweepConfig cfg = resolve(flags);
  cfg.tp_sl = TpSlRegime::uniform(TpSlSpec::none());
  const RunCoordinate coord = enumerate_runs(cfg).front();
  const auto population = build_population(cfg.population(coord.ratio, coord.child_seed));
  const MainFundPlan plan = plan_for(cfg, coord);

  MarketOptions options;
  options.initial_price = cfg.initial_price;
  options.wave_cap = cfg.wave_cap;
  options.record_fills = false;
  StrategyOutcome outcome;
  try {
    outcome = run_plan(population, plan, splitmix64(coord.child_seed), options);
  } catch (const BookExhausted& e) {
    err << "theory-check: " << e.what() << '\n';
    return kConfigError;
  }

  const auto realization = realization_of(outcome, plan, cfg.initial_price);
  const double m_buy = theory::multi_cost(realization);
  const double m_sell = theory::multi_proceeds(realization);
  const double r_exact = theory::multi_return(realization, false);
  const double r_approx = theory::multi_return(realization, true);

  out << "ratio=" << format_double(coord.ratio) << " seed=" << coord.child_seed
      << " plan=" << (plan.kind == PlanKind::kSingle ? "single" : "batch")
      << " shares=" << plan.total_shares << " d_buy=" << plan.d_buy << " d_sell=" << plan.d_sell
      << '\n';
  double worst = 0.0;
  auto row = [&](const char* name, double sim, double th) {
    const double rel = relative_error(sim, th);
    worst = std::max(worst, rel);
    out << name << " sim=" << format_double(sim) << " theory=" << format_double(th)
        << " rel_err=" << format_double(rel) << '\n';
  };
  row("m_buy", outcome.m_buy, m_buy);
  row("m_sell", outcome.m_sell, m_sell);
  row("r_mf", outcome.r_mf, r_exact);
  if (plan.kind == PlanKind::kSingle) {
    const auto& buy = outcome.period_results[0].activation;
    const auto& sell = outcome.period_results[1].activation;
    row("r_mf_factored", outcome.r_mf, theory::single_return(buy, sell, plan.total_shares));
  }
  out << "r_mf_first_order=" << format_double(r_approx)
      << " abs_diff=" << format_double(std::abs(r_approx - r_exact)) << '\n';

  const bool ok = worst < kOracleTolerance;
  out << (ok ? "MATCH" : "MISMATCH") << " max_rel_err=" << format_double(worst) << '\n';
  return ok ? kOk : kOracleMismatch;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agent-based market simulator: main fund vs trend and contrarian investors",
               "pyramid-sim"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* order_size = app.add_subcommand("sweep-order-size", "Single-plan sweep over n_mf and ratio");
  auto* periods = app.add_subcommand("sweep-periods", "Batch-plan sweep over D_buy x D_sell");
  auto* single = app.add_subcommand("single-run", "One simulation with the full fill trace");
  auto* check = app.add_subcommand("theory-check", "Compare one simulation with the closed form");
  for (auto* cmd : {order_size, periods, single, check}) add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "pyramid-sim: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (order_size->parsed()) return sweep(flags, PlanKind::kSingle, "sweep-order-size", out, err);
    if (periods->parsed()) return sweep(flags, PlanKind::kBatch, "sweep-periods", out, err);
    if (single->parsed()) return single_run(flags, out);
    if (check->parsed()) return theory_check(flags, out, err);
  } catch (const ConfigError& e) {
    err << "pyramid-sim: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidConfig& e) {
    err << "pyramid-sim: " << e.what() << '\n';
    return kConfigError;
  } catch (const SimulationError& e) {
    err << "pyramid-sim: internal invariant violated: " << e.what() << '\n';
    return kInvariantViolation;
  }
  return kConfigError;
}

}  // namespace pyramid::cli
