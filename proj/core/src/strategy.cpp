#include "pyramid/strategy.hpp"

#include <string>

#include "pyramid/errors.hpp"

namespace pyramid {

void MainFundPlan::validate() const {
  if (total_shares < 1) throw InvalidConfig("main fund order size must be >= 1");
  if (kind == PlanKind::kSingle && (d_buy != 1 || d_sell != 1))
    throw InvalidConfig("a single plan has one buy and one sell period");
  if (d_buy < 1 || d_buy > 5 || d_sell < 1 || d_sell > 5)
    throw InvalidConfig("D_buy and D_sell must lie in [1, 5]");
  if (total_shares < d_buy || total_shares < d_sell)
    throw InvalidConfig("total shares must cover every trading period");
}

std::vector<Quantity> split_shares(Quantity total, int periods) {
  if (periods < 1) throw InvalidConfig("need at least one period");
  std::vector<Quantity> sizes(static_cast<std::size_t>(periods), total / periods);
  sizes.back() += total % periods;
  return sizes;
}

std::vector<Quantity> MainFundPlan::buy_sizes() const { return split_shares(total_shares, d_buy); }
std::vector<Quantity> MainFundPlan::sell_sizes() const {
  return split_shares(total_shares, d_sell);
}

StrategyOutcome run_plan(std::span<const Investor> population, const MainFundPlan& plan,
                         std::uint64_t seed, MarketOptions options) {
  plan.validate();
  options.seed = seed;
  Market market(population, std::move(options));

  StrategyOutcome out;
  auto trade = [&](Side side, Quantity size) {
    market.begin_period();
    auto result = market.run_period(MainFundOrder{side, size});
    (side == Side::kBuy ? out.m_buy : out.m_sell) += result.main_fund_notional;
    out.period_results.push_back(std::move(result));
  };
  for (Quantity size : plan.buy_sizes()) trade(Side::kBuy, size);
  for (Quantity size : plan.sell_sizes()) trade(Side::kSell, size);

  out.final_inventory = market.main_fund_shares();
  if (out.final_inventory != 0)
    throw InvariantViolation("main fund ended with " + std::to_string(out.final_inventory) +
                             " shares");
  out.r_mf = out.m_sell / out.m_buy - 1.0;
  return out;
}

StrategyOutcome run_single_strategy(std::span<const Investor> population, Quantity n_mf,
                                    std::uint64_t seed, MarketOptions options) {
  return run_plan(population, MainFundPlan::single(n_mf), seed, std::move(options));
}

StrategyOutcome run_batch_strategy(std::span<const Investor> population, Quantity total_shares,
                                   int d_buy, int d_sell, std::uint64_t seed,
                                   MarketOptions options) {
  return run_plan(population, MainFundPlan::batch(total_shares, d_buy, d_sell), seed,
                  std::move(options));
}

theory::MultiPeriodRealization realization_of(const StrategyOutcome& outcome,
                                              const MainFundPlan& plan, double initial_price) {
  const auto buys = plan.buy_sizes();
  const auto sells = plan.sell_sizes();
  if (outcome.period_results.size() != buys.size() + sells.size())
    throw std::invalid_argument("outcome does not match plan");
  std::vector<theory::PeriodLeg> buy_legs;
  std::vector<theory::PeriodLeg> sell_legs;
  for (std::size_t i = 0; i < buys.size(); ++i)
    buy_legs.push_back({outcome.period_results[i].activation, buys[i]});
  for (std::size_t i = 0; i < sells.size(); ++i)
    sell_legs.push_back({outcome.period_results[buys.size() + i].activation, sells[i]});
  return theory::MultiPeriodRealization::from_cascades(initial_price, std::move(buy_legs),
                                                       std::move(sell_legs));
}

}  // namespace pyramid
