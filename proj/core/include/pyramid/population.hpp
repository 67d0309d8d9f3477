#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pyramid/types.hpp"

namespace pyramid {

// One row of the investor structure table. Contrarian and trend investors in
// a tier share the r_market distribution.
struct TierSpec {
  double mean_r_market = 0.0;
  double sigma_r_market = 0.0;
  std::int64_t contrarian_count = 0;
  std::int64_t trend_count_base = 0;  // scaled by PopulationConfig::ratio
  double p_active = 0.5;

  void validate() const;
};

enum class TpSlRule : std::uint8_t {
  kNone,
  kEqual,          // r_profit = |r_loss| ~ U(lo, hi)
  kProfitGreater,  // |r_loss| ~ U(lo, hi), r_profit ~ U(|r_loss|, hi)
  kLossGreater,    // r_profit ~ U(lo, hi), |r_loss| ~ U(r_profit, hi)
};

struct TpSlSpec {
  TpSlRule rule = TpSlRule::kNone;
  double lo = 0.0;
  double hi = 0.0;

  static TpSlSpec none() { return {}; }
  static TpSlSpec equal(double lo, double hi) { return {TpSlRule::kEqual, lo, hi}; }
  static TpSlSpec profit_greater(double lo, double hi) {
    return {TpSlRule::kProfitGreater, lo, hi};
  }
  static TpSlSpec loss_greater(double lo, double hi) {
    return {TpSlRule::kLossGreater, lo, hi};
  }

  void validate() const;
  // "none", "equal:0.02:0.08", ... Inverse of parse_tp_sl_spec.
  std::string label() const;

  friend bool operator==(const TpSlSpec&, const TpSlSpec&) = default;
};

TpSlSpec parse_tp_sl_spec(const std::string& text);

// Take-profit / stop-loss assignment. A uniform regime applies the same rule
// to both classes; per-class regimes drive the one-sided experiments.
struct TpSlRegime {
  TpSlSpec contrarian;
  TpSlSpec trend;

  static TpSlRegime uniform(TpSlSpec spec) { return {spec, spec}; }
  static TpSlRegime per_class(TpSlSpec contrarian, TpSlSpec trend) {
    return {contrarian, trend};
  }

  bool is_per_class() const { return !(contrarian == trend); }
  bool is_none() const {
    return contrarian.rule == TpSlRule::kNone && trend.rule == TpSlRule::kNone;
  }
  const TpSlSpec& for_type(StrategyType type) const {
    return type == StrategyType::kTrend ? trend : contrarian;
  }
  void validate() const;
  // Uniform regimes print as their spec label, per-class ones as
  // "contrarian=<label>|trend=<label>".
  std::string label() const;

  friend bool operator==(const TpSlRegime&, const TpSlRegime&) = default;
};

struct PopulationConfig {
  std::vector<TierSpec> tiers;
  double ratio = 0.4;
  TpSlRegime tp_sl;
  std::uint64_t seed = 0;

  void validate() const;
};

// Investor structure table: +-0.1 contrarian walls of 20000 each and three
// symmetric tier pairs of 2000 contrarians plus 2000*ratio trend investors.
std::vector<TierSpec> default_tiers(double p_active = 0.5);

struct Investor {
  InvestorId id = 0;
  StrategyType type = StrategyType::kContrarian;
  double r_market = 0.0;
  std::optional<double> r_profit;  // > 0 when present
  std::optional<double> r_loss;    // < 0 when present
  double p_active = 0.5;
};

struct TpSlDraw {
  std::optional<double> r_profit;
  std::optional<double> r_loss;
};

TpSlDraw sample_tp_sl(const TpSlSpec& spec, std::mt19937_64& rng);

// Round half to even, as used for trend counts.
std::int64_t round_half_even(double value);

// Tier by tier: contrarians first, then trend investors. Ids are dense and
// follow that order. r_market and TP/SL use independent streams derived from
// config.seed, so switching regimes leaves r_market draws unchanged.
std::vector<Investor> build_population(const PopulationConfig& config);

}  // namespace pyramid
