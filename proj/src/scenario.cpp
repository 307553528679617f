#include "bribery/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <random>
#include <sstream>

#include "bribery/equilibrium.hpp"

namespace bribery {

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& path,
                       const std::string& message) {
  std::string where = path;
  if (node.IsDefined() && node.Mark().line >= 0) {
    where = "line " + std::to_string(node.Mark().line + 1) + ", " + path;
  }
  throw ScenarioError(where + ": " + message);
}

template <typename T>
T as(const YAML::Node& node, const std::string& path, const char* expected) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, path, std::string("expected ") + expected);
  }
}

double as_real(const YAML::Node& node, const std::string& path) {
  return as<double>(node, path, "a number");
}

std::size_t as_count(const YAML::Node& node, const std::string& path) {
  const auto v = as<long long>(node, path, "a non-negative integer");
  if (v < 0) fail(node, path, "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::pair<double, double> real_range(const YAML::Node& node, const std::string& path,
                                     double lo, double hi) {
  if (!node) return {lo, hi};
  if (node.IsScalar()) {
    const double v = as_real(node, path);
    return {v, v};
  }
  if (!node.IsSequence() || node.size() != 2) fail(node, path, "expected [min, max]");
  const double a = as_real(node[0], path + "[0]");
  const double b = as_real(node[1], path + "[1]");
  if (a > b) fail(node, path, "min exceeds max");
  return {a, b};
}

std::pair<std::size_t, std::size_t> count_range(const YAML::Node& node,
                                                const std::string& path,
                                                std::size_t lo, std::size_t hi) {
  if (!node) return {lo, hi};
  if (node.IsScalar()) {
    const auto v = as_count(node, path);
    return {v, v};
  }
  if (!node.IsSequence() || node.size() != 2) fail(node, path, "expected [min, max]");
  const auto a = as_count(node[0], path + "[0]");
  const auto b = as_count(node[1], path + "[1]");
  if (a > b) fail(node, path, "min exceeds max");
  return {a, b};
}

SellerState parse_seller(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
  if (!node["id"]) fail(node, path + ".id", "missing");
  const auto id = as<std::string>(node["id"], path + ".id", "a string");
  try {
    if (node["ratings"]) {
      const auto& list = node["ratings"];
      if (!list.IsSequence()) fail(list, path + ".ratings", "expected a list");
      std::vector<Rating> ratings;
      for (std::size_t r = 0; r < list.size(); ++r) {
        const auto where = path + ".ratings[" + std::to_string(r) + "]";
        const double v = as_real(list[r], where);
        if (!(v >= 0.0 && v <= 1.0)) fail(list[r], where, "rating outside [0, 1]");
        ratings.emplace_back(v);
      }
      const std::size_t raters = node["rater_count"]
                                     ? as_count(node["rater_count"], path + ".rater_count")
                                     : ratings.size();
      if (raters < ratings.size()) {
        fail(node["rater_count"], path + ".rater_count", "fewer raters than ratings");
      }
      return SellerState(id, std::move(ratings), raters);
    }
    if (!node["rating_count"] || !node["mean_rating"]) {
      fail(node, path, "needs either `ratings` or `rating_count` + `mean_rating`");
    }
    const auto count = as_count(node["rating_count"], path + ".rating_count");
    const double mean = as_real(node["mean_rating"], path + ".mean_rating");
    if (!(mean >= 0.0 && mean <= 1.0)) {
      fail(node["mean_rating"], path + ".mean_rating", "rating outside [0, 1]");
    }
    return SellerState::uniform(id, count, mean);
  } catch (const ScenarioError&) {
    throw;
  } catch (const InvalidInput& e) {
    fail(node, path, e.what());
  }
}

Market parse_market(const YAML::Node& node, std::uint64_t seed) {
  if (!node || !node.IsMap()) fail(node, "market", "missing or not a mapping");
  if (const auto& random = node["random"]) {
    RandomMarketSpec spec;
    std::tie(spec.min_sellers, spec.max_sellers) =
        count_range(random["sellers"], "market.random.sellers", 1, 3);
    std::tie(spec.min_total_buyers, spec.max_total_buyers) =
        count_range(random["total_buyers"], "market.random.total_buyers", 2, 30);
    std::tie(spec.min_profit, spec.max_profit) =
        real_range(random["profit"], "market.random.profit", 0.5, 4.0);
    if (random["snowball_exponent"]) {
      spec.snowball_exponent =
          as_real(random["snowball_exponent"], "market.random.snowball_exponent");
    }
    if (spec.min_sellers == 0 || !(spec.min_profit > 0.0) ||
        !(spec.snowball_exponent > 0.0)) {
      fail(random, "market.random", "sellers, profit and exponent must be positive");
    }
    std::mt19937_64 rng(seed);
    return random_market(rng, spec);
  }
  for (const char* key : {"total_buyers", "profit_per_purchase", "sellers"}) {
    if (!node[key]) fail(node, std::string("market.") + key, "missing");
  }
  const auto& list = node["sellers"];
  if (!list.IsSequence()) fail(list, "market.sellers", "expected a list");
  std::vector<SellerState> sellers;
  for (std::size_t i = 0; i < list.size(); ++i) {
    sellers.push_back(parse_seller(list[i], "market.sellers[" + std::to_string(i) + "]"));
  }
  const auto total = as_count(node["total_buyers"], "market.total_buyers");
  const double k = as_real(node["profit_per_purchase"], "market.profit_per_purchase");
  const double o1 = node["snowball_scale"]
                        ? as_real(node["snowball_scale"], "market.snowball_scale")
                        : 1.0;
  const double o2 = node["snowball_exponent"]
                        ? as_real(node["snowball_exponent"], "market.snowball_exponent")
                        : 1.0;
  try {
    return Market(std::move(sellers), total, k, o1, o2);
  } catch (const InvalidInput& e) {
    fail(node, "market", e.what());
  }
}

std::size_t seller_ref(const Market& market, const YAML::Node& node,
                       const std::string& path) {
  const auto id = as<std::string>(node, path, "a seller id");
  for (std::size_t i = 0; i < market.size(); ++i) {
    if (market.seller(i).id() == id) return i;
  }
  fail(node, path, "unknown seller '" + id + "'");
}

std::vector<double> real_list(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) fail(node, path, "expected a list");
  std::vector<double> out;
  for (std::size_t a = 0; a < node.size(); ++a) {
    out.push_back(as_real(node[a], path + "[" + std::to_string(a) + "]"));
  }
  return out;
}

BeliefModel parse_belief(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap()) fail(node, path, "expected a mapping");
  auto anchor = BeliefModel::Anchor::Absolute;
  if (node["anchor"]) {
    const auto text = as<std::string>(node["anchor"], path + ".anchor", "a string");
    if (text == "relative") {
      anchor = BeliefModel::Anchor::RelativeToTrue;
    } else if (text != "absolute") {
      fail(node["anchor"], path + ".anchor", "expected `absolute` or `relative`");
    }
  }
  if (!node["support"] || !node["weights"]) fail(node, path, "needs `support` and `weights`");
  const auto& sup = node["support"];
  if (!sup.IsSequence()) fail(sup, path + ".support", "expected a list");
  std::vector<std::int64_t> support;
  for (std::size_t a = 0; a < sup.size(); ++a) {
    support.push_back(as<std::int64_t>(sup[a], path + ".support[" + std::to_string(a) + "]",
                                       "an integer"));
  }
  try {
    return BeliefModel(std::move(support), real_list(node["weights"], path + ".weights"),
                       anchor);
  } catch (const InvalidInput& e) {
    fail(node, path, e.what());
  }
}

}  // namespace

SequentialGame Scenario::game() const {
  return SequentialGame{market, order, caps, beliefs, policies};
}

CountProfile parse_caps(const std::string& text) {
  std::vector<std::size_t> caps;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || v < 0) {
      throw ScenarioError("--caps: '" + part + "' is not a non-negative integer");
    }
    caps.push_back(static_cast<std::size_t>(v));
  }
  return CountProfile(std::move(caps));
}

Scenario parse_scenario(const std::string& text,
                        std::optional<std::uint64_t> seed_override,
                        std::optional<CountProfile> caps_override) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError("line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ScenarioError("scenario must be a mapping");
  if (!root["schema_version"]) fail(root, "schema_version", "missing");
  const auto version = as<int>(root["schema_version"], "schema_version", "an integer");
  if (version != kScenarioSchemaVersion) {
    fail(root["schema_version"], "schema_version",
         "unsupported version " + std::to_string(version));
  }

  std::uint64_t seed = 0;
  if (root["seed"]) seed = as<std::uint64_t>(root["seed"], "seed", "an unsigned integer");
  if (seed_override) seed = *seed_override;

  Market market = parse_market(root["market"], seed);
  const std::size_t m = market.size();

  CountProfile caps = default_caps(market);
  if (root["caps"]) {
    const auto& node = root["caps"];
    if (!node.IsSequence() || node.size() != m) {
      fail(node, "caps", "expected one cap per seller");
    }
    std::vector<std::size_t> values;
    for (std::size_t i = 0; i < m; ++i) {
      values.push_back(as_count(node[i], "caps[" + std::to_string(i) + "]"));
    }
    caps = CountProfile(std::move(values));
  }
  if (caps_override) {
    if (caps_override->size() != m) {
      throw ScenarioError("--caps: expected " + std::to_string(m) + " values");
    }
    caps = *caps_override;
  }

  Scenario s{market, caps};
  s.seed = seed;

  if (root["budget"]) {
    const double budget = as_real(root["budget"], "budget");
    if (!(budget >= 0.0)) fail(root["budget"], "budget", "must be non-negative");
    s.budget = budget;
  }

  if (root["order"]) {
    const auto& node = root["order"];
    if (!node.IsSequence()) fail(node, "order", "expected a list of seller ids");
    for (std::size_t p = 0; p < node.size(); ++p) {
      s.order.push_back(seller_ref(market, node[p], "order[" + std::to_string(p) + "]"));
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) s.order.push_back(i);
  }

  s.beliefs.assign(m, BeliefModel::truth());
  if (root["beliefs"]) {
    const auto& node = root["beliefs"];
    if (!node.IsMap()) fail(node, "beliefs", "expected a mapping from seller id");
    for (const auto& kv : node) {
      const auto path = "beliefs." + kv.first.as<std::string>();
      s.beliefs[seller_ref(market, kv.first, path)] = parse_belief(kv.second, path);
    }
  }

  if (root["policy"]) {
    const auto text = as<std::string>(root["policy"], "policy", "a string");
    if (text == "equilibrium") {
      s.policy_rule = PolicyRule::Equilibrium;
    } else if (text == "uniform") {
      s.policy_rule = PolicyRule::Uniform;
    } else if (text == "fixed") {
      s.policy_rule = PolicyRule::Fixed;
    } else {
      fail(root["policy"], "policy", "expected equilibrium, uniform or fixed");
    }
  }
  if (s.policy_rule == PolicyRule::Fixed) {
    const auto& node = root["policies"];
    if (!node || !node.IsMap()) fail(node, "policies", "required for `policy: fixed`");
    s.policies.assign(m, {});
    for (const auto& kv : node) {
      const auto base = "policies." + kv.first.as<std::string>();
      const auto seller = seller_ref(market, kv.first, base);
      if (!kv.second.IsSequence()) fail(kv.second, base, "expected a list of entries");
      for (std::size_t e = 0; e < kv.second.size(); ++e) {
        const auto& entry = kv.second[e];
        const auto path = base + "[" + std::to_string(e) + "]";
        if (!entry["history"] || !entry["distribution"]) {
          fail(entry, path, "needs `history` and `distribution`");
        }
        History h;
        for (std::size_t q = 0; q < entry["history"].size(); ++q) {
          h.push_back(as_count(entry["history"][q], path + ".history"));
        }
        s.policies[seller][h] = real_list(entry["distribution"], path + ".distribution");
      }
    }
  }

  if (root["arrivals"]) {
    const auto& node = root["arrivals"];
    if (!node["rates"]) fail(node, "arrivals.rates", "missing");
    s.arrival_rates = real_list(node["rates"], "arrivals.rates");
    for (std::size_t t = 0; t < s.arrival_rates.size(); ++t) {
      if (!(s.arrival_rates[t] >= 0.0)) {
        fail(node["rates"][t], "arrivals.rates[" + std::to_string(t) + "]",
             "rate must be non-negative");
      }
    }
  }
  if (root["slots"]) s.slots = as_count(root["slots"], "slots");

  s.fairness.seller = 0;
  s.fairness.cap = market.potential_buyers();
  if (const auto& node = root["fairness"]) {
    if (node["seller"]) s.fairness.seller = seller_ref(market, node["seller"], "fairness.seller");
    if (node["cap"]) {
      s.fairness.cap = as_count(node["cap"], "fairness.cap");
      if (s.fairness.cap > market.potential_buyers()) {
        fail(node["cap"], "fairness.cap", "exceeds the potential buyers");
      }
    }
  }
  if (m > 0) s.fairness.fair_mean = mean_rating(market.seller(s.fairness.seller));
  if (const auto& node = root["fairness"]; node && node["fair_mean"]) {
    s.fairness.fair_mean = as_real(node["fair_mean"], "fairness.fair_mean");
    if (!(s.fairness.fair_mean >= 0.0 && s.fairness.fair_mean <= 1.0)) {
      fail(node["fair_mean"], "fairness.fair_mean", "must lie in [0, 1]");
    }
  }

  try {
    validate(s.game(), s.policy_rule == PolicyRule::Fixed);
  } catch (const ScenarioError&) {
    throw;
  } catch (const InvalidInput& e) {
    throw ScenarioError(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override,
                       std::optional<CountProfile> caps_override) {
  std::ifstream in(path);
  if (!in) {
    if (path == "example1") {
      return parse_scenario(example1_scenario_text(), seed_override, caps_override);
    }
    throw ScenarioError("cannot open scenario file '" + path.string() + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str(), seed_override, caps_override);
}

std::string example1_scenario_text() {
  return R"(schema_version: 1
market:
  total_buyers: 20
  profit_per_purchase: 2
  sellers:
    - {id: i, rating_count: 5, mean_rating: 0.2}
    - {id: j, rating_count: 2, mean_rating: 0.5}
caps: [3, 3]
order: [j, i]
policy: equilibrium
arrivals: {rates: [0]}
slots: 1
seed: 1
fairness: {seller: i, fair_mean: 0.2}
)";
}

}  // namespace bribery
