#include "pyramid/orderbook.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pyramid/errors.hpp"

namespace pyramid {

Book::Book(double last_price) : last_price_(last_price) {
  if (!(last_price > 0.0)) throw InvalidConfig("book needs a positive initial price");
}

OrderId Book::new_slot(OwnerId owner, Side side, OrderKind kind, double price, Quantity size) {
  const auto id = static_cast<OrderId>(slots_.size());
  slots_.push_back(Slot{owner, price, size, side, kind, kind != OrderKind::kMarket});
  return id;
}

OrderId Book::place_limit(OwnerId owner, Side side, double price, Quantity size) {
  if (size < 1) throw InvalidConfig("order size must be >= 1");
  if (!(price > 0.0) || !std::isfinite(price)) throw InvalidConfig("limit price must be positive");

  if (side == Side::kBuy) {
    if (auto ask = best_ask(); ask && price >= *ask)
      throw CrossedBook("bid " + std::to_string(price) + " crosses ask " + std::to_string(*ask));
  } else {
    if (auto bid = best_bid(); bid && price <= *bid)
      throw CrossedBook("ask " + std::to_string(price) + " crosses bid " + std::to_string(*bid));
  }

  const OrderId id = new_slot(owner, side, OrderKind::kLimit, price, size);
  if (side == Side::kBuy) {
    // Ladders are loaded best-first, so new levels usually belong at the back.
    bids_.try_emplace(bids_.end(), price)->second.queue.push_back(id);
    bid_depth_ += size;
  } else {
    asks_.try_emplace(asks_.end(), price)->second.queue.push_back(id);
    ask_depth_ += size;
  }
  return id;
}

OrderId Book::place_stop(OwnerId owner, Side side, double trigger, Quantity size) {
  if (size < 1) throw InvalidConfig("order size must be >= 1");
  if (!(trigger > 0.0) || !std::isfinite(trigger))
    throw InvalidConfig("stop trigger must be positive");
  const OrderId id = new_slot(owner, side, OrderKind::kStop, trigger, size);
  if (side == Side::kBuy)
    stop_buys_.emplace(trigger, id);
  else
    stop_sells_.emplace(trigger, id);
  ++live_stops_;
  return id;
}

template <typename Levels>
void Book::sweep(Levels& levels, OrderId aggressor, OwnerId owner, Side side, Quantity size,
                 std::vector<Fill>& out) {
  Quantity& depth = side == Side::kBuy ? ask_depth_ : bid_depth_;
  while (size > 0) {
    auto it = levels.begin();
    Level& level = it->second;
    while (size > 0 && level.head < level.queue.size()) {
      const OrderId resting = level.queue[level.head];
      Slot& slot = slots_[resting];
      if (!slot.live) {
        ++level.head;
        continue;
      }
      const Quantity qty = std::min(size, slot.remaining);
      Fill fill;
      fill.price = it->first;
      fill.size = qty;
      fill.seq = fill_seq_++;
      fill.aggressor = side;
      if (side == Side::kBuy) {
        fill.buy_owner = owner;
        fill.buy_order = aggressor;
        fill.sell_owner = slot.owner;
        fill.sell_order = resting;
      } else {
        fill.buy_owner = slot.owner;
        fill.buy_order = resting;
        fill.sell_owner = owner;
        fill.sell_order = aggressor;
      }
      out.push_back(fill);
      last_price_ = it->first;
      size -= qty;
      depth -= qty;
      slot.remaining -= qty;
      if (slot.remaining == 0) {
        slot.live = false;
        ++level.head;
      }
    }
    if (level.head == level.queue.size()) levels.erase(it);
  }
}

OrderId Book::execute_market(OwnerId owner, Side side, Quantity size, std::vector<Fill>& out) {
  if (size < 1) throw InvalidConfig("order size must be >= 1");
  const Quantity available = depth(opposite(side));
  if (available < size)
    throw BookExhausted(std::string("market ") + to_string(side) + " of " + std::to_string(size) +
                        " against " + std::to_string(available) + " resting units");
  const OrderId id = new_slot(owner, side, OrderKind::kMarket, 0.0, size);
  if (side == Side::kBuy)
    sweep(asks_, id, owner, side, size, out);
  else
    sweep(bids_, id, owner, side, size, out);
  return id;
}

std::vector<Fill> Book::execute_market(OwnerId owner, Side side, Quantity size) {
  std::vector<Fill> out;
  execute_market(owner, side, size, out);
  return out;
}

std::vector<Order> Book::poll_stops(double last_price) {
  std::vector<Order> fired;
  auto drain = [&](auto& stops, auto reached) {
    while (!stops.empty() && reached(stops.begin()->first)) {
      const OrderId id = stops.begin()->second;
      stops.erase(stops.begin());
      Slot& slot = slots_[id];
      if (!slot.live) continue;
      fired.push_back(to_order(id));
      slot.live = false;
      --live_stops_;
    }
  };
  drain(stop_buys_, [&](double trigger) { return trigger <= last_price; });
  drain(stop_sells_, [&](double trigger) { return trigger >= last_price; });
  return fired;
}

bool Book::cancel(OrderId id) {
  if (id >= slots_.size()) return false;
  Slot& slot = slots_[id];
  if (!slot.live) return false;
  slot.live = false;
  if (slot.kind == OrderKind::kStop) {
    --live_stops_;
  } else if (slot.side == Side::kBuy) {
    bid_depth_ -= slot.remaining;
    trim_front(bids_);
  } else {
    ask_depth_ -= slot.remaining;
    trim_front(asks_);
  }
  return true;
}

bool Book::is_live(OrderId id) const { return id < slots_.size() && slots_[id].live; }

template <typename Levels>
void Book::trim_front(Levels& levels) {
  while (!levels.empty()) {
    Level& level = levels.begin()->second;
    while (level.head < level.queue.size() && !slots_[level.queue[level.head]].live) ++level.head;
    if (level.head < level.queue.size()) return;
    levels.erase(levels.begin());
  }
}

template <typename Levels>
void Book::compact_levels(Levels& levels) {
  for (auto it = levels.begin(); it != levels.end();) {
    auto& queue = it->second.queue;
    queue.erase(queue.begin(), queue.begin() + static_cast<std::ptrdiff_t>(it->second.head));
    it->second.head = 0;
    std::erase_if(queue, [&](OrderId id) { return !slots_[id].live; });
    it = queue.empty() ? levels.erase(it) : std::next(it);
  }
}

void Book::compact() {
  compact_levels(asks_);
  compact_levels(bids_);
  std::erase_if(stop_buys_, [&](const auto& kv) { return !slots_[kv.second].live; });
  std::erase_if(stop_sells_, [&](const auto& kv) { return !slots_[kv.second].live; });
}

std::optional<double> Book::best_bid() {
  trim_front(bids_);
  if (bids_.empty()) return std::nullopt;
  return bids_.begin()->first;
}

std::optional<double> Book::best_ask() {
  trim_front(asks_);
  if (asks_.empty()) return std::nullopt;
  return asks_.begin()->first;
}

Order Book::to_order(OrderId id) const {
  const Slot& slot = slots_[id];
  Order order;
  order.order_id = id;
  order.owner_id = slot.owner;
  order.side = slot.side;
  order.kind = slot.kind;
  order.price = slot.price;
  order.size = slot.remaining;
  order.seq = id;
  return order;
}

template <typename Levels>
void Book::collect(const Levels& levels, std::vector<Order>& out) const {
  for (const auto& [price, level] : levels)
    for (std::size_t i = level.head; i < level.queue.size(); ++i)
      if (slots_[level.queue[i]].live) out.push_back(to_order(level.queue[i]));
}

std::vector<Order> Book::resting(Side side) const {
  std::vector<Order> out;
  if (side == Side::kBuy)
    collect(bids_, out);
  else
    collect(asks_, out);
  return out;
}

std::vector<Order> Book::resting_stops(Side side) const {
  std::vector<Order> out;
  auto gather = [&](const auto& stops) {
    for (const auto& [trigger, id] : stops)
      if (slots_[id].live) out.push_back(to_order(id));
  };
  if (side == Side::kBuy)
    gather(stop_buys_);
  else
    gather(stop_sells_);
  return out;
}

}  // namespace pyramid
