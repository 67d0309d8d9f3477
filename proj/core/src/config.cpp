#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "pyramid/errors.hpp"
#include "pyramid/experiment.hpp"

namespace pyramid {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Inline comments: whitespace followed by ';' or '#'.
std::string strip_comment(const std::string& raw) {
  for (std::size_t i = 1; i < raw.size(); ++i)
    if ((raw[i] == ';' || raw[i] == '#') && (raw[i - 1] == ' ' || raw[i - 1] == '\t'))
      return trim(std::string_view(raw).substr(0, i));
  return trim(raw);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string_view rest(text);
  while (true) {
    const auto pos = rest.find(sep);
    out.push_back(trim(rest.substr(0, pos)));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(what + ": cannot parse '" + text + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ConfigError(what + ": value must be finite");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_number<T>(item, what));
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

class Section {
 public:
  Section(std::string name, const pt::ptree& tree, std::set<std::string> allowed,
          const std::string& source)
      : name_(std::move(name)), source_(source) {
    for (const auto& [key, node] : tree) {
      if (!allowed.contains(key))
        throw ConfigError(source_ + ": unknown key '" + key + "' in [" + name_ + "]");
      values_[key] = strip_comment(node.data());
    }
  }

  const std::string* find(const std::string& key) const {
    auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }
  std::string where(const std::string& key) const { return source_ + ": [" + name_ + "] " + key; }

 private:
  std::string name_;
  std::string source_;
  std::map<std::string, std::string> values_;
};

}  // namespace

std::vector<Quantity> parse_size_list(const std::string& text) {
  if (text.rfind("geometric:", 0) == 0) {
    const auto parts = split(text, ':');
    if (parts.size() != 4) throw ConfigError("geometric list needs LO:HI:COUNT");
    const auto lo = parse_number<double>(parts[1], "geometric lo");
    const auto hi = parse_number<double>(parts[2], "geometric hi");
    const auto count = parse_number<int>(parts[3], "geometric count");
    if (!(lo >= 1.0 && hi >= lo && count >= 1)) throw ConfigError("geometric list out of range");
    std::vector<Quantity> out;
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      const auto v = static_cast<Quantity>(std::llround(lo * std::pow(hi / lo, t)));
      if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
  }
  return parse_list<Quantity>(text, "size list");
}

void SweepConfig::validate() const {
  if (tiers.empty()) throw ConfigError("population needs at least one tier");
  if (ratios.empty()) throw ConfigError("ratio list is empty");
  for (double r : ratios)
    if (!(r >= 0.0)) throw ConfigError("ratio must be >= 0");
  if (p_active && !(*p_active >= 0.0 && *p_active <= 1.0))
    throw ConfigError("p_active must lie in [0, 1]");
  if (!(initial_price > 0.0)) throw ConfigError("initial_price must be positive");
  if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (wave_cap < 1) throw ConfigError("wave_cap must be >= 1");
  try {
    for (const auto& tier : tiers) tier.validate();
    tp_sl.validate();
    if (plan == PlanKind::kSingle) {
      if (n_mf.empty()) throw ConfigError("n_mf list is empty");
      for (Quantity n : n_mf) MainFundPlan::single(n).validate();
    } else {
      if (d_buy.empty() || d_sell.empty()) throw ConfigError("d_buy / d_sell lists are empty");
      for (int b : d_buy)
        for (int s : d_sell) MainFundPlan::batch(total_shares, b, s).validate();
    }
  } catch (const InvalidConfig& e) {
    throw ConfigError(e.what());
  }
}

std::vector<TierSpec> SweepConfig::effective_tiers() const {
  auto out = tiers;
  if (p_active)
    for (auto& tier : out) tier.p_active = *p_active;
  return out;
}

PopulationConfig SweepConfig::population(double ratio, std::uint64_t seed) const {
  return PopulationConfig{effective_tiers(), ratio, tp_sl, seed};
}

SweepConfig parse_config(std::istream& in, const std::string& source) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  SweepConfig cfg;
  std::map<int, TierSpec> custom_tiers;

  for (const auto& [name, node] : tree) {
    if (node.empty() && !node.data().empty())
      throw ConfigError(source + ": key '" + name + "' outside of any section");

    if (name == "population") {
      Section s(name, node,
                {"ratio", "p_active", "tp_sl", "tp_sl_contrarian", "tp_sl_trend", "initial_price"},
                source);
      if (auto v = s.find("ratio")) cfg.ratios = parse_list<double>(*v, s.where("ratio"));
      if (auto v = s.find("p_active")) cfg.p_active = parse_number<double>(*v, s.where("p_active"));
      if (auto v = s.find("initial_price"))
        cfg.initial_price = parse_number<double>(*v, s.where("initial_price"));
      const auto* uniform = s.find("tp_sl");
      const auto* contrarian = s.find("tp_sl_contrarian");
      const auto* trend = s.find("tp_sl_trend");
      try {
        if (uniform && (contrarian || trend))
          throw ConfigError(s.where("tp_sl") + ": use either tp_sl or the per-class keys");
        if (uniform) cfg.tp_sl = TpSlRegime::uniform(parse_tp_sl_spec(*uniform));
        if (contrarian || trend)
          cfg.tp_sl = TpSlRegime::per_class(
              contrarian ? parse_tp_sl_spec(*contrarian) : TpSlSpec::none(),
              trend ? parse_tp_sl_spec(*trend) : TpSlSpec::none());
      } catch (const InvalidConfig& e) {
        throw ConfigError(s.where("tp_sl") + ": " + e.what());
      }
    } else if (name.rfind("tier.", 0) == 0) {
      const int index = parse_number<int>(name.substr(5), source + ": section [" + name + "]");
      Section s(name, node, {"mean", "sigma", "contrarian", "trend_base", "p_active"}, source);
      TierSpec tier;
      auto need = [&](const char* key) -> const std::string& {
        if (auto v = s.find(key)) return *v;
        throw ConfigError(s.where(key) + " is required");
      };
      tier.mean_r_market = parse_number<double>(need("mean"), s.where("mean"));
      tier.sigma_r_market = parse_number<double>(need("sigma"), s.where("sigma"));
      tier.contrarian_count = parse_number<std::int64_t>(need("contrarian"), s.where("contrarian"));
      tier.trend_count_base = parse_number<std::int64_t>(need("trend_base"), s.where("trend_base"));
      if (auto v = s.find("p_active")) tier.p_active = parse_number<double>(*v, s.where("p_active"));
      custom_tiers[index] = tier;
    } else if (name == "plan") {
      Section s(name, node, {"kind", "n_mf", "total_shares", "d_buy", "d_sell"}, source);
      if (auto v = s.find("kind")) {
        if (*v == "single")
          cfg.plan = PlanKind::kSingle;
        else if (*v == "batch")
          cfg.plan = PlanKind::kBatch;
        else
          throw ConfigError(s.where("kind") + ": expected single or batch, got '" + *v + "'");
      }
      if (auto v = s.find("n_mf")) cfg.n_mf = parse_size_list(*v);
      if (auto v = s.find("total_shares"))
        cfg.total_shares = parse_number<Quantity>(*v, s.where("total_shares"));
      if (auto v = s.find("d_buy")) cfg.d_buy = parse_list<int>(*v, s.where("d_buy"));
      if (auto v = s.find("d_sell")) cfg.d_sell = parse_list<int>(*v, s.where("d_sell"));
    } else if (name == "run") {
      Section s(name, node, {"repetitions", "master_seed", "output", "workers", "wave_cap"}, source);
      if (auto v = s.find("repetitions"))
        cfg.repetitions = parse_number<std::int64_t>(*v, s.where("repetitions"));
      if (auto v = s.find("master_seed"))
        cfg.master_seed = parse_number<std::uint64_t>(*v, s.where("master_seed"));
      if (auto v = s.find("output")) cfg.output_path = *v;
      if (auto v = s.find("workers"))
        cfg.workers = parse_number<std::size_t>(*v, s.where("workers"));
      if (auto v = s.find("wave_cap"))
        cfg.wave_cap = parse_number<std::size_t>(*v, s.where("wave_cap"));
    } else {
      throw ConfigError(source + ": unknown section [" + name + "]");
    }
  }

  if (!custom_tiers.empty()) {
    cfg.tiers.clear();
    for (auto& [index, tier] : custom_tiers) cfg.tiers.push_back(tier);
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in, path.string());
}

}  // namespace pyramid
