#pragma once

#include <cstdint>

namespace pyramid {

using InvestorId = std::int64_t;
using OwnerId = std::int64_t;
using OrderId = std::uint64_t;
using Quantity = std::int64_t;

// Owner id of the single large agent. Small investors use ids >= 0.
inline constexpr OwnerId kMainFund = -1;

enum class Side : std::uint8_t { kBuy, kSell };

constexpr Side opposite(Side side) noexcept {
  return side == Side::kBuy ? Side::kSell : Side::kBuy;
}

constexpr const char* to_string(Side side) noexcept {
  return side == Side::kBuy ? "buy" : "sell";
}

enum class StrategyType : std::uint8_t { kTrend, kContrarian };

constexpr const char* to_string(StrategyType type) noexcept {
  return type == StrategyType::kTrend ? "trend" : "contrarian";
}

}  // namespace pyramid
