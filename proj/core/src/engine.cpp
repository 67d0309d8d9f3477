#include "pyramid/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "pyramid/errors.hpp"

namespace pyramid {
namespace {

bool draw_active(double p, std::mt19937_64& rng) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

}  // namespace

std::int64_t PeriodResult::trend_triggered() const {
  std::int64_t total = 0;
  for (auto n : cascade_counts) total += n;
  return total;
}

Market::Market(std::span<const Investor> population, MarketOptions options)
    : investors_(population),
      options_(std::move(options)),
      book_(options_.initial_price),
      rng_(options_.seed),
      status_(population.size()),
      cash_(population.size(), 0.0),
      anchor_(options_.initial_price) {
  for (std::size_t i = 0; i < investors_.size(); ++i) {
    const Investor& inv = investors_[i];
    if (inv.id != static_cast<InvestorId>(i))
      throw InvalidConfig("investor ids must be dense and ordered");
    if (inv.r_market == 0.0) throw InvalidConfig("investor r_market must be nonzero");
    const bool up = inv.r_market > 0.0;
    if (inv.type == StrategyType::kContrarian)
      (up ? ask_order_ : bid_order_).push_back(inv.id);
    else
      (up ? trend_up_order_ : trend_down_order_).push_back(inv.id);
  }
  auto by_magnitude = [this](InvestorId a, InvestorId b) {
    return std::abs(investors_[static_cast<std::size_t>(a)].r_market) <
           std::abs(investors_[static_cast<std::size_t>(b)].r_market);
  };
  for (auto* order : {&ask_order_, &bid_order_, &trend_up_order_, &trend_down_order_})
    std::stable_sort(order->begin(), order->end(), by_magnitude);
  active_.resize(investors_.size());
}

double Market::cash(OwnerId owner) const {
  if (owner == kMainFund) return mf_cash_;
  return cash_.at(static_cast<std::size_t>(owner));
}

void Market::begin_period() {
  ++period_;
  anchor_ = book_.last_price();

  // Unfilled contrarian quotes were priced off the old anchor.
  for (OrderId id : entry_quotes_) book_.cancel(id);
  entry_quotes_.clear();
  book_.compact();

  for (std::size_t i = 0; i < investors_.size(); ++i) {
    auto& st = status_[i];
    st.locked_this_period = false;
    active_[i] = st.position == 0 && draw_active(investors_[i].p_active, rng_);
  }

  activation_ = theory::ActivationRealization{};
  activation_.anchor_price = anchor_;
  armed_up_.clear();
  armed_down_.clear();
  up_cursor_ = 0;
  down_cursor_ = 0;

  for (InvestorId id : ask_order_) {
    if (!active_[static_cast<std::size_t>(id)]) continue;
    const double r = investors_[static_cast<std::size_t>(id)].r_market;
    entry_quotes_.push_back(book_.place_limit(id, Side::kSell, (1.0 + r) * anchor_, 1));
    activation_.asks.push_back(r);
  }
  for (InvestorId id : bid_order_) {
    if (!active_[static_cast<std::size_t>(id)]) continue;
    const double r = investors_[static_cast<std::size_t>(id)].r_market;
    entry_quotes_.push_back(book_.place_limit(id, Side::kBuy, (1.0 + r) * anchor_, 1));
    activation_.bids.push_back(r);
  }
  for (InvestorId id : trend_up_order_) {
    if (!active_[static_cast<std::size_t>(id)]) continue;
    const double r = investors_[static_cast<std::size_t>(id)].r_market;
    armed_up_.push_back({(1.0 + r) * anchor_, id});
    activation_.trend_up.push_back(r);
  }
  for (InvestorId id : trend_down_order_) {
    if (!active_[static_cast<std::size_t>(id)]) continue;
    const double r = investors_[static_cast<std::size_t>(id)].r_market;
    armed_down_.push_back({(1.0 + r) * anchor_, id});
    activation_.trend_down.push_back(r);
  }
  period_open_ = true;
}

PeriodResult Market::run_period(std::optional<MainFundOrder> order) {
  if (!period_open_) throw std::logic_error("run_period called without begin_period");
  period_open_ = false;

  PeriodResult result;
  result.period_index = period_;
  result.anchor_price = anchor_;
  result.activation = std::move(activation_);
  activation_ = {};

  if (order) submit_market(kMainFund, order->side, order->size, false, result);

  std::size_t waves = 0;
  while (true) {
    const double last = book_.last_price();
    const auto stops = book_.poll_stops(last);
    const std::size_t up_begin = up_cursor_;
    while (up_cursor_ < armed_up_.size() && armed_up_[up_cursor_].trigger <= last) ++up_cursor_;
    const std::size_t down_begin = down_cursor_;
    while (down_cursor_ < armed_down_.size() && armed_down_[down_cursor_].trigger >= last)
      ++down_cursor_;
    const auto triggered =
        static_cast<std::int64_t>((up_cursor_ - up_begin) + (down_cursor_ - down_begin));
    if (stops.empty() && triggered == 0) break;
    if (++waves > options_.wave_cap)
      throw NonTermination("period " + std::to_string(period_) + " exceeded " +
                           std::to_string(options_.wave_cap) + " cascade waves");

    std::int64_t stops_fired = 0;
    for (const Order& stop : stops) {
      auto& st = status_[static_cast<std::size_t>(stop.owner_id)];
      if (st.sl_order != stop.order_id) continue;  // position already closed this wave
      st.sl_order.reset();
      if (st.tp_order) {
        book_.cancel(*st.tp_order);
        st.tp_order.reset();
      }
      submit_market(stop.owner_id, stop.side, stop.size, true, result);
      ++stops_fired;
    }
    for (std::size_t i = up_begin; i < up_cursor_; ++i)
      submit_market(armed_up_[i].id, Side::kBuy, 1, false, result);
    for (std::size_t i = down_begin; i < down_cursor_; ++i)
      submit_market(armed_down_[i].id, Side::kSell, 1, false, result);

    result.cascade_counts.push_back(triggered);
    result.stop_counts.push_back(stops_fired);
  }

  result.closing_price = book_.last_price();
  if (options_.audit) check_conservation();
  return result;
}

void Market::submit_market(OwnerId owner, Side side, Quantity size, bool exits,
                           PeriodResult& result) {
  scratch_.clear();
  book_.execute_market(owner, side, size, scratch_);
  process_fills(0, scratch_, owner, exits, result);
}

void Market::process_fills(std::size_t first, std::vector<Fill>& fills, OwnerId aggressor,
                           bool aggressor_exits, PeriodResult& result) {
  for (std::size_t i = first; i < fills.size(); ++i) {
    const Fill& fill = fills[i];
    settle(fill);
    if (options_.on_fill) options_.on_fill(period_, fill);
    if (options_.record_fills) result.fills.push_back(fill);

    if (aggressor == kMainFund) {
      const double value = fill.price * static_cast<double>(fill.size);
      result.main_fund_notional += value;
      result.main_fund_cash_flow += fill.aggressor == Side::kBuy ? -value : value;
      result.main_fund_shares_delta += fill.aggressor == Side::kBuy ? fill.size : -fill.size;
    }

    const OwnerId passive = fill.resting_owner();
    if (passive == kMainFund) continue;
    const auto& st = status_[static_cast<std::size_t>(passive)];
    if (st.tp_order == fill.resting_order())
      close_position(passive);
    else
      open_position(passive, fill.price);
  }

  if (aggressor == kMainFund || fills.size() == first) return;
  if (aggressor_exits)
    close_position(aggressor);
  else
    open_position(aggressor, fills.back().price);
}

void Market::settle(const Fill& fill) {
  const double value = fill.price * static_cast<double>(fill.size);
  auto apply = [&](OwnerId owner, Quantity shares, double cash) {
    if (owner == kMainFund) {
      mf_shares_ += shares;
      mf_cash_ += cash;
      return;
    }
    auto& st = status_[static_cast<std::size_t>(owner)];
    st.position += static_cast<int>(shares);
    cash_[static_cast<std::size_t>(owner)] += cash;
    if (st.position < -1 || st.position > 1)
      throw InvariantViolation("investor " + std::to_string(owner) + " reached position " +
                               std::to_string(st.position));
  };
  apply(fill.buy_owner, fill.size, -value);
  apply(fill.sell_owner, -fill.size, value);
}

void Market::open_position(InvestorId id, double price) {
  auto& st = status_[static_cast<std::size_t>(id)];
  if (st.position == 0 || st.locked_this_period)
    throw InvariantViolation("investor " + std::to_string(id) + " opened without a position");
  st.entry_price = price;
  place_tp_sl(id, price, st.position);
}

void Market::close_position(InvestorId id) {
  auto& st = status_[static_cast<std::size_t>(id)];
  if (st.position != 0)
    throw InvariantViolation("investor " + std::to_string(id) + " exit left a position");
  if (st.tp_order) book_.cancel(*st.tp_order);
  if (st.sl_order) book_.cancel(*st.sl_order);
  st.tp_order.reset();
  st.sl_order.reset();
  st.entry_price.reset();
  st.locked_this_period = true;
}

void Market::place_tp_sl(InvestorId id, double entry_price, int position) {
  if (position != 1 && position != -1) throw std::invalid_argument("position must be +1 or -1");
  const Investor& inv = investors_[static_cast<std::size_t>(id)];
  auto& st = status_[static_cast<std::size_t>(id)];
  const Side exit_side = position > 0 ? Side::kSell : Side::kBuy;
  if (inv.r_profit) {
    const double target =
        position > 0 ? entry_price * (1.0 + *inv.r_profit) : entry_price * (1.0 - *inv.r_profit);
    st.tp_order = book_.place_limit(id, exit_side, target, 1);
  }
  if (inv.r_loss) {
    const double loss = std::abs(*inv.r_loss);
    const double trigger = position > 0 ? entry_price * (1.0 - loss) : entry_price * (1.0 + loss);
    st.sl_order = book_.place_stop(id, exit_side, trigger, 1);
  }
}

LedgerAudit Market::audit() const {
  LedgerAudit out;
  out.position_sum = mf_shares_;
  // Neumaier summation keeps the cash total meaningful across ~1e5 balances.
  double sum = mf_cash_;
  double comp = 0.0;
  out.gross_cash = std::abs(mf_cash_);
  for (std::size_t i = 0; i < status_.size(); ++i) {
    out.position_sum += status_[i].position;
    const double x = cash_[i];
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    out.gross_cash += std::abs(x);
  }
  out.cash_sum = sum + comp;
  return out;
}

void Market::check_conservation() const {
  const auto a = audit();
  if (a.position_sum != 0)
    throw InvariantViolation("share positions net to " + std::to_string(a.position_sum));
  if (std::abs(a.cash_sum) > 1e-9 * std::max(1.0, a.gross_cash))
    throw InvariantViolation("cash balances net to " + std::to_string(a.cash_sum));
}

}  // namespace pyramid
