#pragma once

#include <cstdint>
#include <vector>

namespace pyramid::theory {

// Relative quote levels of the small investors activated in one trading
// period, each measured against that period's anchor price.
//
//   asks        positive contrarian rates, ascending
//   bids        negative contrarian rates, ascending in magnitude
//   trend_up    positive trend triggers, ascending
//   trend_down  negative trend triggers, ascending in magnitude
struct ActivationRealization {
  std::vector<double> asks;
  std::vector<double> bids;
  std::vector<double> trend_up;
  std::vector<double> trend_down;
  double anchor_price = 1.0;

  // Throws std::invalid_argument on unsorted, non-finite, zero or wrong-sign
  // entries, or a non-positive anchor.
  void validate() const;
};

struct CascadeResult {
  std::vector<std::int64_t> waves;  // trend investors triggered per wave, all > 0
  std::int64_t total = 0;           // N_t^X (or N_t^Y on the sell side)
};

// Total paid for a market buy of `shares` against the ask ladder.
double cost_of_buy(const ActivationRealization& r, std::int64_t shares);

// Wave-by-wave count of trend buyers triggered after a market buy of
// `shares`. Throws InsufficientDepth if the ladder runs out first.
CascadeResult cascade_counts(const ActivationRealization& r, std::int64_t shares);
// Mirror image for a market sell against the bid ladder and trend_down.
CascadeResult cascade_counts_down(const ActivationRealization& r, std::int64_t shares);

// Relative closing move of a buy period, r^{C+}_{shares + N_t^X}; zero when
// nothing traded.
double closing_rate_up(const ActivationRealization& r, std::int64_t shares);
double closing_rate_down(const ActivationRealization& r, std::int64_t shares);

// Proceeds of a market sell of `shares` into bids quoted around `p1`.
double proceeds_of_sell(const ActivationRealization& r, std::int64_t shares, double p1);

// Main-fund return for buying `shares` in one period and selling them in
// the next, in the factored form (1 + r_close)(1 + mean bid)/(1 + mean ask) - 1.
double single_return(const ActivationRealization& buy, const ActivationRealization& sell,
                     std::int64_t shares);
// Same quantity as proceeds/cost - 1.
double single_return_direct(const ActivationRealization& buy, const ActivationRealization& sell,
                            std::int64_t shares);

struct PeriodLeg {
  ActivationRealization ladder;  // anchor_price is ignored; anchors follow from f_b / f_s
  std::int64_t shares = 0;
};

// Batched plan over D_buy buy periods and D_sell sell periods.
// f_b[k-1] holds f_b(k), the closing move of buy period k; likewise f_s.
struct MultiPeriodRealization {
  double initial_price = 1.0;
  std::vector<PeriodLeg> buys;
  std::vector<PeriodLeg> sells;
  std::vector<double> f_b;
  std::vector<double> f_s;

  // Fills f_b / f_s from each leg's own cascade.
  static MultiPeriodRealization from_cascades(double initial_price, std::vector<PeriodLeg> buys,
                                              std::vector<PeriodLeg> sells);
  void validate() const;
};

// Price at the end of the last buy period.
double sell_start_price(const MultiPeriodRealization& m);
double multi_cost(const MultiPeriodRealization& m);
double multi_proceeds(const MultiPeriodRealization& m);

// approximate = false: multi_proceeds / multi_cost - 1.
// approximate = true: first-order form keeping only linear terms of the quote
// rates inside the averaged cost and proceeds. Unequal leg sizes are weighted
// by their share of the total, which reduces to 1/D for equal legs.
double multi_return(const MultiPeriodRealization& m, bool approximate);

}  // namespace pyramid::theory
