#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "pyramid/types.hpp"

namespace pyramid {

enum class OrderKind : std::uint8_t { kLimit, kMarket, kStop };

struct Order {
  OrderId order_id = 0;
  OwnerId owner_id = 0;
  Side side = Side::kBuy;
  OrderKind kind = OrderKind::kLimit;
  double price = 0.0;  // limit price, or trigger price for stops; unused for market orders
  Quantity size = 0;
  std::uint64_t seq = 0;
};

struct Fill {
  OwnerId buy_owner = 0;
  OwnerId sell_owner = 0;
  OrderId buy_order = 0;
  OrderId sell_order = 0;
  double price = 0.0;  // always the resting order's limit price
  Quantity size = 0;
  std::uint64_t seq = 0;
  Side aggressor = Side::kBuy;

  OrderId resting_order() const { return aggressor == Side::kBuy ? sell_order : buy_order; }
  OwnerId resting_owner() const { return aggressor == Side::kBuy ? sell_owner : buy_owner; }
};

// Continuous auction with price-time priority. Orders are identified by a
// dense submission counter, which is also their time-priority sequence.
//
// Cancellation is lazy: cancelled or filled entries stay in their price level
// until matching reaches them or compact() runs.
class Book {
 public:
  explicit Book(double last_price);

  // Throws CrossedBook if the order would trade on arrival.
  OrderId place_limit(OwnerId owner, Side side, double price, Quantity size);
  OrderId place_stop(OwnerId owner, Side side, double trigger, Quantity size);

  // Sweeps the opposite side best-first. Throws BookExhausted, leaving the
  // book untouched, if fewer than `size` units rest there. Fills are appended
  // to `out` in execution order.
  OrderId execute_market(OwnerId owner, Side side, Quantity size, std::vector<Fill>& out);
  std::vector<Fill> execute_market(OwnerId owner, Side side, Quantity size);

  // Removes and returns every stop buy with trigger <= last_price and every
  // stop sell with trigger >= last_price; buys first, each side in
  // trigger-then-seq order.
  std::vector<Order> poll_stops(double last_price);
  std::vector<Order> poll_stops() { return poll_stops(last_price_); }

  // False if the order is unknown, filled, or already cancelled.
  bool cancel(OrderId id);
  bool is_live(OrderId id) const;

  // Drops dead entries and empty levels.
  void compact();

  double last_price() const { return last_price_; }
  std::optional<double> best_bid();
  std::optional<double> best_ask();
  Quantity depth(Side side) const { return side == Side::kBuy ? bid_depth_ : ask_depth_; }
  std::size_t stop_count() const { return live_stops_; }
  std::uint64_t orders_submitted() const { return slots_.size(); }

  // Live resting limits of one side in priority order (tests and tracing).
  std::vector<Order> resting(Side side) const;
  std::vector<Order> resting_stops(Side side) const;

 private:
  struct Slot {
    OwnerId owner;
    double price;
    Quantity remaining;
    Side side;
    OrderKind kind;
    bool live;
  };
  struct Level {
    std::vector<OrderId> queue;
    std::size_t head = 0;
  };
  using AskLevels = std::map<double, Level>;
  using BidLevels = std::map<double, Level, std::greater<double>>;
  using StopBuys = std::multimap<double, OrderId>;
  using StopSells = std::multimap<double, OrderId, std::greater<double>>;

  OrderId new_slot(OwnerId owner, Side side, OrderKind kind, double price, Quantity size);
  template <typename Levels>
  void sweep(Levels& levels, OrderId aggressor, OwnerId owner, Side side, Quantity size,
             std::vector<Fill>& out);
  template <typename Levels>
  void trim_front(Levels& levels);
  template <typename Levels>
  void compact_levels(Levels& levels);
  template <typename Levels>
  void collect(const Levels& levels, std::vector<Order>& out) const;
  Order to_order(OrderId id) const;

  std::vector<Slot> slots_;
  AskLevels asks_;
  BidLevels bids_;
  StopBuys stop_buys_;
  StopSells stop_sells_;
  Quantity ask_depth_ = 0;
  Quantity bid_depth_ = 0;
  std::size_t live_stops_ = 0;
  double last_price_;
  std::uint64_t fill_seq_ = 0;
};

}  // namespace pyramid
