#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "pyramid/errors.hpp"
#include "pyramid/strategy.hpp"
#include "pyramid/theory.hpp"

namespace pyramid {
namespace {

using testing::make_population;
using testing::symmetric_contrarians;

TEST(SingleStrategy, SymmetricSingleLevel) {
  const auto pop = make_population(symmetric_contrarians({0.05}));
  const auto out = run_single_strategy(pop, 1, 1);
  EXPECT_NEAR(out.r_mf, -0.05, 1e-15);
  EXPECT_DOUBLE_EQ(out.m_buy, 105.0);
  EXPECT_DOUBLE_EQ(out.m_sell, 105.0 * 0.95);
}

TEST(SingleStrategy, TwoLevelLadder) {
  const auto pop = make_population(symmetric_contrarians({0.01, 0.02}));
  const auto out = run_single_strategy(pop, 2, 1);
  EXPECT_NEAR(out.r_mf, 1.02 * (1.0 - 0.015) / (1.0 + 0.015) - 1.0, 1e-15);
  EXPECT_NEAR(out.r_mf, -0.010148, 5e-7);
  EXPECT_EQ(out.final_inventory, 0);
  ASSERT_EQ(out.period_results.size(), 2u);
  EXPECT_DOUBLE_EQ(out.period_results[0].closing_price, 102.0);
}

TEST(SingleStrategy, AccountingIdentity) {
  const auto pop = build_population({default_tiers(), 0.4, {}, 8});
  const auto out = run_single_strategy(pop, 1500, 9);
  EXPECT_EQ(out.r_mf, out.m_sell / out.m_buy - 1.0);
  EXPECT_DOUBLE_EQ(out.profit(), out.m_sell - out.m_buy);
  EXPECT_EQ(out.period_results[0].main_fund_shares_delta, 1500);
  EXPECT_EQ(out.period_results[1].main_fund_shares_delta, -1500);
  EXPECT_DOUBLE_EQ(out.period_results[0].main_fund_cash_flow, -out.m_buy);
  EXPECT_DOUBLE_EQ(out.period_results[1].main_fund_cash_flow, out.m_sell);
}

TEST(SingleStrategy, SwallowingASideIsReported) {
  const auto pop = make_population(symmetric_contrarians({0.01, 0.02}));
  EXPECT_THROW(run_single_strategy(pop, 3, 1), BookExhausted);
  EXPECT_THROW(run_single_strategy(pop, 0, 1), InvalidConfig);
}

TEST(BatchStrategy, OneByOneEqualsSingle) {
  const auto pop = build_population({default_tiers(), 0.8, {}, 31});
  for (Quantity n : {50, 800, 2000}) {
    const auto single = run_single_strategy(pop, n, 32);
    const auto batch = run_batch_strategy(pop, n, 1, 1, 32);
    EXPECT_EQ(single.m_buy, batch.m_buy);
    EXPECT_EQ(single.m_sell, batch.m_sell);
    EXPECT_EQ(single.r_mf, batch.r_mf);
  }
}

TEST(BatchStrategy, RemainderGoesToLastPeriod) {
  EXPECT_EQ(split_shares(2000, 3), (std::vector<Quantity>{666, 666, 668}));
  EXPECT_EQ(split_shares(2000, 5), (std::vector<Quantity>(5, 400)));
  EXPECT_EQ(split_shares(7, 4), (std::vector<Quantity>{1, 1, 1, 4}));
  for (int d = 1; d <= 5; ++d) {
    Quantity total = 0;
    for (auto n : split_shares(1999, d)) total += n;
    EXPECT_EQ(total, 1999);
  }
}

TEST(BatchStrategy, PeriodOrdersFollowThePlan) {
  const auto pop = build_population({default_tiers(), 0.4, {}, 41});
  const auto out = run_batch_strategy(pop, 2000, 3, 2, 42);
  ASSERT_EQ(out.period_results.size(), 5u);
  const Quantity expected[] = {666, 666, 668, -1000, -1000};
  for (int i = 0; i < 5; ++i)
    EXPECT_EQ(out.period_results[static_cast<std::size_t>(i)].main_fund_shares_delta, expected[i]);
  EXPECT_EQ(out.final_inventory, 0);
  // Each period re-anchors on the previous close.
  for (std::size_t i = 1; i < 5; ++i)
    EXPECT_EQ(out.period_results[i].anchor_price, out.period_results[i - 1].closing_price);
}

TEST(MainFundPlan, Validation) {
  EXPECT_NO_THROW(MainFundPlan::batch(5, 5, 5).validate());
  EXPECT_THROW(MainFundPlan::batch(4, 5, 1).validate(), InvalidConfig);
  EXPECT_THROW(MainFundPlan::batch(2000, 6, 1).validate(), InvalidConfig);
  EXPECT_THROW(MainFundPlan::batch(2000, 1, 0).validate(), InvalidConfig);
  EXPECT_THROW(MainFundPlan::single(0).validate(), InvalidConfig);
}

TEST(Strategy, MainFundEndsFlatUnderEveryRegime) {
  const TpSlRegime regimes[] = {
      TpSlRegime{}, TpSlRegime::uniform(TpSlSpec::equal(0.02, 0.08)),
      TpSlRegime::uniform(TpSlSpec::profit_greater(0.02, 0.08)),
      TpSlRegime::uniform(TpSlSpec::loss_greater(0.02, 0.08))};
  std::uint64_t seed = 50;
  for (const auto& regime : regimes) {
    const auto pop = build_population({default_tiers(), 0.4, regime, seed});
    for (int d_buy : {1, 4})
      for (int d_sell : {2, 5}) {
        const auto out = run_batch_strategy(pop, 2000, d_buy, d_sell, ++seed);
        EXPECT_EQ(out.final_inventory, 0);
        EXPECT_TRUE(std::isfinite(out.r_mf));
      }
  }
}

TEST(Strategy, ScaleInvariance) {
  const auto pop =
      build_population({default_tiers(), 0.4, TpSlRegime::uniform(TpSlSpec::equal(0.02, 0.08)), 61});
  for (double c : {0.37, 3.0, 1000.0}) {
    MarketOptions base;
    base.initial_price = 100.0;
    MarketOptions scaled;
    scaled.initial_price = 100.0 * c;
    const auto a = run_batch_strategy(pop, 2000, 2, 3, 62, base);
    const auto b = run_batch_strategy(pop, 2000, 2, 3, 62, scaled);
    EXPECT_LT(std::abs(b.m_buy / (c * a.m_buy) - 1.0), 1e-12);
    EXPECT_LT(std::abs(b.m_sell / (c * a.m_sell) - 1.0), 1e-12);
    EXPECT_LT(std::abs(b.r_mf - a.r_mf), 1e-12 * std::max(1.0, std::abs(a.r_mf)));
  }
}

TEST(Strategy, ClosedFormMatchesSimulation) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const double ratio = (seed % 3 == 0) ? 0.1 : (seed % 3 == 1 ? 0.4 : 1.6);
    const auto pop = build_population({default_tiers(), ratio, {}, seed});
    const Quantity n = seed % 2 ? 500 : 2000;
    const auto plan = MainFundPlan::single(n);
    const auto out = run_plan(pop, plan, seed + 7);
    const auto& buy = out.period_results[0].activation;
    const auto& sell = out.period_results[1].activation;
    EXPECT_LT(std::abs(theory::single_return(buy, sell, n) / out.r_mf - 1.0), 1e-9);

    const auto m = realization_of(out, plan, 100.0);
    EXPECT_LT(std::abs(theory::multi_cost(m) / out.m_buy - 1.0), 1e-9);
    EXPECT_LT(std::abs(theory::multi_proceeds(m) / out.m_sell - 1.0), 1e-9);
  }
}

TEST(Strategy, BatchClosedFormMatchesSimulation) {
  std::uint64_t seed = 100;
  for (int d_buy : {2, 5})
    for (int d_sell : {1, 3}) {
      const auto pop = build_population({default_tiers(), 0.4, {}, ++seed});
      const auto plan = MainFundPlan::batch(2000, d_buy, d_sell);
      const auto out = run_plan(pop, plan, seed);
      const auto m = realization_of(out, plan, 100.0);
      EXPECT_LT(std::abs(theory::multi_cost(m) / out.m_buy - 1.0), 1e-9);
      EXPECT_LT(std::abs(theory::multi_proceeds(m) / out.m_sell - 1.0), 1e-9);
      EXPECT_LT(std::abs(theory::multi_return(m, false) - out.r_mf), 1e-9);
      for (std::size_t k = 0; k < m.f_b.size(); ++k)
        EXPECT_DOUBLE_EQ(1.0 + m.f_b[k], out.period_results[k].closing_price /
                                              out.period_results[k].anchor_price);
    }
}

}  // namespace
}  // namespace pyramid
