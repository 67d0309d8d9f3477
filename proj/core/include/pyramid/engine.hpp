#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pyramid/orderbook.hpp"
#include "pyramid/population.hpp"
#include "pyramid/theory.hpp"

namespace pyramid {

struct InvestorStatus {
  int position = 0;  // -1, 0 or +1
  std::optional<double> entry_price;
  std::optional<OrderId> tp_order;
  std::optional<OrderId> sl_order;
  bool locked_this_period = false;
};

struct MainFundOrder {
  Side side = Side::kBuy;
  Quantity size = 0;
};

struct PeriodResult {
  std::int64_t period_index = 0;
  double anchor_price = 0.0;
  double closing_price = 0.0;
  std::vector<Fill> fills;
  // Trend investors triggered per cascade wave. A wave in which only stops
  // fired records 0 here and its stop count in stop_counts.
  std::vector<std::int64_t> cascade_counts;
  std::vector<std::int64_t> stop_counts;
  double main_fund_cash_flow = 0.0;  // proceeds minus cost
  double main_fund_notional = 0.0;   // sum of price * size over main-fund fills
  Quantity main_fund_shares_delta = 0;
  theory::ActivationRealization activation;

  std::int64_t trend_triggered() const;
};

struct MarketOptions {
  double initial_price = 100.0;
  std::uint64_t seed = 0;
  std::size_t wave_cap = 10'000;
  bool record_fills = true;
  // Recompute position and cash totals at the end of every period and throw
  // InvariantViolation if shares do not net to zero.
  bool audit = true;
  std::function<void(std::int64_t period, const Fill&)> on_fill;
};

struct LedgerAudit {
  std::int64_t position_sum = 0;  // over all small investors plus the main fund
  double cash_sum = 0.0;          // compensated sum of all cash balances
  double gross_cash = 0.0;        // sum of |cash|, the scale for cash_sum
};

// Trading-period state machine over one population. Single threaded; the
// population must outlive the market.
//
// Each period: begin_period() re-anchors, cancels stale contrarian quotes,
// draws activation for flat investors and posts their ladders; run_period()
// injects the main-fund order and runs trend / stop cascades to a fixpoint.
class Market {
 public:
  Market(std::span<const Investor> population, MarketOptions options);

  void begin_period();
  PeriodResult run_period(std::optional<MainFundOrder> order);

  // Places the take-profit limit and stop-loss stop for a fresh position.
  // No-op for investors without TP/SL parameters.
  void place_tp_sl(InvestorId investor, double entry_price, int position);

  std::int64_t period_index() const { return period_; }
  double anchor_price() const { return anchor_; }
  double last_price() const { return book_.last_price(); }
  const Book& book() const { return book_; }
  Book& book() { return book_; }
  const InvestorStatus& status(InvestorId id) const { return status_.at(static_cast<std::size_t>(id)); }
  double cash(OwnerId owner) const;
  Quantity main_fund_shares() const { return mf_shares_; }
  std::span<const Investor> population() const { return investors_; }

  LedgerAudit audit() const;

 private:
  struct Armed {
    double trigger;
    InvestorId id;
  };

  void process_fills(std::size_t first, std::vector<Fill>& fills, OwnerId aggressor,
                     bool aggressor_exits, PeriodResult& result);
  void settle(const Fill& fill);
  void open_position(InvestorId id, double price);
  void close_position(InvestorId id);
  void submit_market(OwnerId owner, Side side, Quantity size, bool exits, PeriodResult& result);
  void check_conservation() const;

  std::span<const Investor> investors_;
  MarketOptions options_;
  Book book_;
  std::mt19937_64 rng_;

  std::vector<InvestorStatus> status_;
  std::vector<double> cash_;
  double mf_cash_ = 0.0;
  Quantity mf_shares_ = 0;

  // Population orderings fixed at construction: asks and trend-up ascending
  // in r_market, bids and trend-down ascending in |r_market|, ties by id.
  std::vector<InvestorId> ask_order_;
  std::vector<InvestorId> bid_order_;
  std::vector<InvestorId> trend_up_order_;
  std::vector<InvestorId> trend_down_order_;

  std::int64_t period_ = 0;
  double anchor_;
  bool period_open_ = false;
  std::vector<char> active_;
  std::vector<OrderId> entry_quotes_;
  std::vector<Armed> armed_up_;
  std::vector<Armed> armed_down_;
  std::size_t up_cursor_ = 0;
  std::size_t down_cursor_ = 0;
  theory::ActivationRealization activation_;
  std::vector<Fill> scratch_;
};

}  // namespace pyramid
