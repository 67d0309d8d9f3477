#include "pyramid/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pyramid/errors.hpp"

namespace pyramid::theory {
namespace {

void check_sorted_by_magnitude(const std::vector<double>& v, bool positive, const char* name) {
  double prev = 0.0;
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(name) + ": non-finite rate");
    if (positive ? !(x > 0.0) : !(x < 0.0))
      throw std::invalid_argument(std::string(name) + ": rate of the wrong sign or zero");
    if (std::abs(x) < prev) throw std::invalid_argument(std::string(name) + ": not sorted");
    prev = std::abs(x);
  }
}

void require_depth(const std::vector<double>& ladder, std::int64_t shares, const char* what) {
  if (shares < 0) throw std::invalid_argument("negative share count");
  if (static_cast<std::size_t>(shares) > ladder.size())
    throw InsufficientDepth(std::string(what) + ": " + std::to_string(shares) +
                            " shares against a ladder of " + std::to_string(ladder.size()));
}

// Eq. (2) recursion, with magnitudes so both sides share the code.
CascadeResult cascade(const std::vector<double>& ladder, const std::vector<double>& triggers,
                      std::int64_t shares) {
  require_depth(ladder, shares, "cascade");
  CascadeResult out;
  if (shares == 0) return out;
  std::size_t fired = 0;
  auto consumed = static_cast<std::size_t>(shares);
  while (true) {
    const double reached = std::abs(ladder[consumed - 1]);
    std::size_t next = fired;
    while (next < triggers.size() && std::abs(triggers[next]) <= reached) ++next;
    const auto wave = static_cast<std::int64_t>(next - fired);
    if (wave == 0) break;
    fired = next;
    consumed += static_cast<std::size_t>(wave);
    if (consumed > ladder.size())
      throw InsufficientDepth("cascade exhausted the ladder after " + std::to_string(fired) +
                              " trend orders");
    out.waves.push_back(wave);
    out.total += wave;
  }
  return out;
}

double ladder_sum(const std::vector<double>& ladder, std::int64_t shares, double price) {
  double sum = 0.0;
  for (std::int64_t i = 0; i < shares; ++i)
    sum += (1.0 + ladder[static_cast<std::size_t>(i)]) * price;
  return sum;
}

double mean_rate(const std::vector<double>& ladder, std::int64_t shares) {
  if (shares == 0) return 0.0;
  double sum = 0.0;
  for (std::int64_t i = 0; i < shares; ++i) sum += ladder[static_cast<std::size_t>(i)];
  return sum / static_cast<double>(shares);
}

std::int64_t total_shares(const std::vector<PeriodLeg>& legs) {
  std::int64_t total = 0;
  for (const auto& leg : legs) total += leg.shares;
  return total;
}

}  // namespace

void ActivationRealization::validate() const {
  check_sorted_by_magnitude(asks, true, "asks");
  check_sorted_by_magnitude(bids, false, "bids");
  check_sorted_by_magnitude(trend_up, true, "trend_up");
  check_sorted_by_magnitude(trend_down, false, "trend_down");
  if (!(anchor_price > 0.0) || !std::isfinite(anchor_price))
    throw std::invalid_argument("anchor_price must be positive");
}

double cost_of_buy(const ActivationRealization& r, std::int64_t shares) {
  require_depth(r.asks, shares, "cost_of_buy");
  return ladder_sum(r.asks, shares, r.anchor_price);
}

CascadeResult cascade_counts(const ActivationRealization& r, std::int64_t shares) {
  return cascade(r.asks, r.trend_up, shares);
}

CascadeResult cascade_counts_down(const ActivationRealization& r, std::int64_t shares) {
  return cascade(r.bids, r.trend_down, shares);
}

double closing_rate_up(const ActivationRealization& r, std::int64_t shares) {
  const auto c = cascade_counts(r, shares);
  const std::int64_t index = shares + c.total;
  return index == 0 ? 0.0 : r.asks[static_cast<std::size_t>(index - 1)];
}

double closing_rate_down(const ActivationRealization& r, std::int64_t shares) {
  const auto c = cascade_counts_down(r, shares);
  const std::int64_t index = shares + c.total;
  return index == 0 ? 0.0 : r.bids[static_cast<std::size_t>(index - 1)];
}

double proceeds_of_sell(const ActivationRealization& r, std::int64_t shares, double p1) {
  require_depth(r.bids, shares, "proceeds_of_sell");
  return ladder_sum(r.bids, shares, p1);
}

double single_return(const ActivationRealization& buy, const ActivationRealization& sell,
                     std::int64_t shares) {
  if (shares < 1) throw std::invalid_argument("single_return needs at least one share");
  const double close = closing_rate_up(buy, shares);
  require_depth(sell.bids, shares, "single_return");
  return (1.0 + close) * (1.0 + mean_rate(sell.bids, shares)) /
             (1.0 + mean_rate(buy.asks, shares)) -
         1.0;
}

double single_return_direct(const ActivationRealization& buy, const ActivationRealization& sell,
                            std::int64_t shares) {
  const double p1 = (1.0 + closing_rate_up(buy, shares)) * buy.anchor_price;
  return proceeds_of_sell(sell, shares, p1) / cost_of_buy(buy, shares) - 1.0;
}

MultiPeriodRealization MultiPeriodRealization::from_cascades(double initial_price,
                                                             std::vector<PeriodLeg> buys,
                                                             std::vector<PeriodLeg> sells) {
  MultiPeriodRealization m;
  m.initial_price = initial_price;
  m.buys = std::move(buys);
  m.sells = std::move(sells);
  for (const auto& leg : m.buys) m.f_b.push_back(closing_rate_up(leg.ladder, leg.shares));
  for (const auto& leg : m.sells) m.f_s.push_back(closing_rate_down(leg.ladder, leg.shares));
  return m;
}

void MultiPeriodRealization::validate() const {
  if (!(initial_price > 0.0)) throw std::invalid_argument("initial_price must be positive");
  if (buys.empty() || sells.empty())
    throw std::invalid_argument("need at least one buy and one sell period");
  if (f_b.size() != buys.size() || f_s.size() != sells.size())
    throw std::invalid_argument("f_b / f_s must have one entry per period");
  for (const auto& leg : buys) require_depth(leg.ladder.asks, leg.shares, "multi_cost");
  for (const auto& leg : sells) require_depth(leg.ladder.bids, leg.shares, "multi_proceeds");
}

double sell_start_price(const MultiPeriodRealization& m) {
  double product = 1.0;
  for (double f : m.f_b) product *= 1.0 + f;
  return product * m.initial_price;
}

double multi_cost(const MultiPeriodRealization& m) {
  m.validate();
  double total = 0.0;
  double growth = 1.0;  // prod_{k=1..j} [1 + f_b(k-1)]
  for (std::size_t j = 0; j < m.buys.size(); ++j) {
    if (j > 0) growth *= 1.0 + m.f_b[j - 1];
    total += ladder_sum(m.buys[j].ladder.asks, m.buys[j].shares, growth * m.initial_price);
  }
  return total;
}

double multi_proceeds(const MultiPeriodRealization& m) {
  m.validate();
  const double start = sell_start_price(m);
  double total = 0.0;
  double growth = 1.0;
  for (std::size_t j = 0; j < m.sells.size(); ++j) {
    if (j > 0) growth *= 1.0 + m.f_s[j - 1];
    total += ladder_sum(m.sells[j].ladder.bids, m.sells[j].shares, growth * start);
  }
  return total;
}

double multi_return(const MultiPeriodRealization& m, bool approximate) {
  if (!approximate) return multi_proceeds(m) / multi_cost(m) - 1.0;

  m.validate();
  const auto n_buy = static_cast<double>(total_shares(m.buys));
  const auto n_sell = static_cast<double>(total_shares(m.sells));
  if (n_buy == 0.0 || n_sell == 0.0) throw std::invalid_argument("empty plan");

  double lead = 1.0;
  for (double f : m.f_b) lead += f;

  double denom = 1.0;
  double drift = 0.0;  // sum_{k=1..j} f_b(k-1)
  for (std::size_t j = 0; j < m.buys.size(); ++j) {
    if (j > 0) drift += m.f_b[j - 1];
    const auto& leg = m.buys[j];
    const double weight = static_cast<double>(leg.shares) / n_buy;
    denom += weight * (mean_rate(leg.ladder.asks, leg.shares) + drift);
  }

  double numer = 1.0;
  drift = 0.0;
  for (std::size_t j = 0; j < m.sells.size(); ++j) {
    if (j > 0) drift += m.f_s[j - 1];
    const auto& leg = m.sells[j];
    const double weight = static_cast<double>(leg.shares) / n_sell;
    numer += weight * (mean_rate(leg.ladder.bids, leg.shares) + drift);
  }
  return lead * numer / denom - 1.0;
}

}  // namespace pyramid::theory
