#include "pyramid/population.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <string_view>

#include "pyramid/errors.hpp"
#include "pyramid/rng.hpp"

namespace pyramid {
namespace {

constexpr std::uint64_t kTpSlStreamTag = 0x7470736c73747265ULL;

const char* rule_name(TpSlRule rule) {
  switch (rule) {
    case TpSlRule::kNone: return "none";
    case TpSlRule::kEqual: return "equal";
    case TpSlRule::kProfitGreater: return "profit_greater";
    case TpSlRule::kLossGreater: return "loss_greater";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double draw_r_market(const TierSpec& tier, std::mt19937_64& rng) {
  if (tier.sigma_r_market == 0.0) return tier.mean_r_market;
  std::normal_distribution<double> dist(tier.mean_r_market, tier.sigma_r_market);
  // A zero draw has no side; redraw.
  double r = dist(rng);
  while (r == 0.0) r = dist(rng);
  return r;
}

}  // namespace

void TierSpec::validate() const {
  if (!(sigma_r_market >= 0.0) || !std::isfinite(sigma_r_market))
    throw InvalidConfig("tier sigma_r_market must be finite and >= 0");
  if (!std::isfinite(mean_r_market))
    throw InvalidConfig("tier mean_r_market must be finite");
  if (sigma_r_market == 0.0 && mean_r_market == 0.0 && contrarian_count + trend_count_base > 0)
    throw InvalidConfig("a tier with sigma 0 needs a nonzero mean");
  if (!(mean_r_market > -1.0))
    throw InvalidConfig("tier mean_r_market must exceed -1");
  if (!(p_active >= 0.0 && p_active <= 1.0))
    throw InvalidConfig("tier p_active must lie in [0, 1]");
  if (contrarian_count < 0 || trend_count_base < 0)
    throw InvalidConfig("tier counts must be >= 0");
}

void TpSlSpec::validate() const {
  if (rule == TpSlRule::kNone) return;
  if (!(lo > 0.0 && lo < hi && hi < 1.0))
    throw InvalidConfig("tp/sl bounds must satisfy 0 < lo < hi < 1, got " + label());
}

std::string TpSlSpec::label() const {
  if (rule == TpSlRule::kNone) return "none";
  return std::string(rule_name(rule)) + ":" + format_number(lo) + ":" + format_number(hi);
}

TpSlSpec parse_tp_sl_spec(const std::string& text) {
  std::vector<std::string> parts;
  std::string_view rest(text);
  while (true) {
    auto pos = rest.find(':');
    parts.emplace_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (parts.size() == 1 && parts[0] == "none") return TpSlSpec::none();
  if (parts.size() != 3) throw InvalidConfig("malformed tp/sl spec '" + text + "'");

  TpSlSpec spec;
  if (parts[0] == "equal") {
    spec.rule = TpSlRule::kEqual;
  } else if (parts[0] == "profit_greater") {
    spec.rule = TpSlRule::kProfitGreater;
  } else if (parts[0] == "loss_greater") {
    spec.rule = TpSlRule::kLossGreater;
  } else {
    throw InvalidConfig("unknown tp/sl rule '" + parts[0] + "'");
  }
  try {
    std::size_t used = 0;
    spec.lo = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
    spec.hi = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
  } catch (const std::logic_error&) {
    throw InvalidConfig("malformed tp/sl bounds in '" + text + "'");
  }
  spec.validate();
  return spec;
}

void TpSlRegime::validate() const {
  contrarian.validate();
  trend.validate();
}

std::string TpSlRegime::label() const {
  if (!is_per_class()) return contrarian.label();
  return "contrarian=" + contrarian.label() + "|trend=" + trend.label();
}

void PopulationConfig::validate() const {
  if (tiers.empty()) throw InvalidConfig("population needs at least one tier");
  if (!(ratio >= 0.0) || !std::isfinite(ratio)) throw InvalidConfig("ratio must be >= 0");
  for (const auto& tier : tiers) tier.validate();
  tp_sl.validate();
}

std::vector<TierSpec> default_tiers(double p_active) {
  return {
      {0.10, 0.00, 20000, 0, p_active},
      {0.08, 0.04, 2000, 2000, p_active},
      {0.04, 0.02, 2000, 2000, p_active},
      {0.02, 0.01, 2000, 2000, p_active},
      {-0.02, 0.01, 2000, 2000, p_active},
      {-0.04, 0.02, 2000, 2000, p_active},
      {-0.08, 0.04, 2000, 2000, p_active},
      {-0.10, 0.00, 20000, 0, p_active},
  };
}

TpSlDraw sample_tp_sl(const TpSlSpec& spec, std::mt19937_64& rng) {
  using Uniform = std::uniform_real_distribution<double>;
  switch (spec.rule) {
    case TpSlRule::kNone:
      return {};
    case TpSlRule::kEqual: {
      const double d = Uniform(spec.lo, spec.hi)(rng);
      return {d, -d};
    }
    case TpSlRule::kProfitGreater: {
      const double loss = Uniform(spec.lo, spec.hi)(rng);
      const double profit = Uniform(loss, spec.hi)(rng);
      return {profit, -loss};
    }
    case TpSlRule::kLossGreater: {
      const double profit = Uniform(spec.lo, spec.hi)(rng);
      const double loss = Uniform(profit, spec.hi)(rng);
      return {profit, -loss};
    }
  }
  return {};
}

std::int64_t round_half_even(double value) {
  // nearbyint honours the current rounding mode, which is to-nearest-even
  // unless someone changed it; do the tie handling explicitly instead.
  const double fl = std::floor(value);
  const double diff = value - fl;
  auto base = static_cast<std::int64_t>(fl);
  if (diff > 0.5) return base + 1;
  if (diff < 0.5) return base;
  return (base % 2 == 0) ? base : base + 1;
}

std::vector<Investor> build_population(const PopulationConfig& config) {
  config.validate();

  std::mt19937_64 market_rng(config.seed);
  std::mt19937_64 tp_sl_rng(splitmix64(config.seed ^ kTpSlStreamTag));

  std::int64_t total = 0;
  for (const auto& tier : config.tiers)
    total += tier.contrarian_count + round_half_even(tier.trend_count_base * config.ratio);

  std::vector<Investor> out;
  out.reserve(static_cast<std::size_t>(total));

  auto emit = [&](const TierSpec& tier, StrategyType type) {
    Investor inv;
    inv.id = static_cast<InvestorId>(out.size());
    inv.type = type;
    inv.r_market = draw_r_market(tier, market_rng);
    const auto draw = sample_tp_sl(config.tp_sl.for_type(type), tp_sl_rng);
    inv.r_profit = draw.r_profit;
    inv.r_loss = draw.r_loss;
    inv.p_active = tier.p_active;
    out.push_back(inv);
  };

  for (const auto& tier : config.tiers) {
    for (std::int64_t i = 0; i < tier.contrarian_count; ++i) emit(tier, StrategyType::kContrarian);
    const std::int64_t trend = round_half_even(tier.trend_count_base * config.ratio);
    for (std::int64_t i = 0; i < trend; ++i) emit(tier, StrategyType::kTrend);
  }
  return out;
}

}  // namespace pyramid
