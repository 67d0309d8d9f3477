#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pyramid/engine.hpp"

namespace pyramid {

enum class PlanKind : std::uint8_t { kSingle, kBatch };

// Buy-then-sell plan of the main fund. A single plan is a batch plan with
// one buy period and one sell period.
struct MainFundPlan {
  PlanKind kind = PlanKind::kSingle;
  Quantity total_shares = 0;
  int d_buy = 1;
  int d_sell = 1;

  static MainFundPlan single(Quantity n_mf) { return {PlanKind::kSingle, n_mf, 1, 1}; }
  static MainFundPlan batch(Quantity total, int d_buy, int d_sell) {
    return {PlanKind::kBatch, total, d_buy, d_sell};
  }

  void validate() const;
  std::vector<Quantity> buy_sizes() const;
  std::vector<Quantity> sell_sizes() const;
};

// floor(total / periods) per period, the last period absorbing the remainder.
std::vector<Quantity> split_shares(Quantity total, int periods);

struct StrategyOutcome {
  double m_buy = 0.0;
  double m_sell = 0.0;
  double r_mf = 0.0;
  Quantity final_inventory = 0;
  std::vector<PeriodResult> period_results;

  double profit() const { return m_sell - m_buy; }
};

// Runs the plan on a fresh market seeded with `seed`. BookExhausted and
// NonTermination propagate.
StrategyOutcome run_plan(std::span<const Investor> population, const MainFundPlan& plan,
                         std::uint64_t seed, MarketOptions options = {});

StrategyOutcome run_single_strategy(std::span<const Investor> population, Quantity n_mf,
                                    std::uint64_t seed, MarketOptions options = {});

StrategyOutcome run_batch_strategy(std::span<const Investor> population, Quantity total_shares,
                                   int d_buy, int d_sell, std::uint64_t seed,
                                   MarketOptions options = {});

// Per-period activation ladders and leg sizes of a completed plan, for
// evaluation by the closed-form model.
theory::MultiPeriodRealization realization_of(const StrategyOutcome& outcome,
                                              const MainFundPlan& plan, double initial_price);

}  // namespace pyramid
