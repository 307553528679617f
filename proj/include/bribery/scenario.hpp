#pragma once

// Scenario files: YAML documents with a `schema_version` field describing a
// market plus the parameters of every command.
//
//   schema_version: 1
//   market:
//     total_buyers: 20
//     profit_per_purchase: 2
//     snowball_scale: 1        # optional
//     snowball_exponent: 1     # optional
//     sellers:
//       - {id: i, rating_count: 5, mean_rating: 0.2}
//       - {id: j, ratings: [0.5, 0.5], rater_count: 2}
//   # or:  market: {random: {sellers: [1, 3], total_buyers: [2, 30],
//   #                         profit: [0.5, 4]}}   (drawn from `seed`)
//   caps: [3, 3]               # default: pool per seller
//   budget: 1.5
//   order: [j, i]              # default: listed order
//   beliefs:
//     i: {anchor: absolute, support: [10, 16], weights: [0.5, 0.5]}
//   policy: equilibrium        # equilibrium | uniform | fixed
//   policies:                  # only for `fixed`
//     i: [{history: [1], distribution: [0, 0, 1, 0]}]
//   arrivals: {rates: [0]}
//   slots: 1
//   seed: 7
//   fairness: {seller: i, fair_mean: 0.2, cap: 13}

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bribery/core.hpp"
#include "bribery/dynamic.hpp"

namespace bribery {

inline constexpr int kScenarioSchemaVersion = 1;

/// Validation failure carrying the offending field path and line.
class ScenarioError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct FairnessParams {
  std::size_t seller = 0;
  double fair_mean = 0.0;
  std::size_t cap = 0;
};

struct Scenario {
  Market market;
  CountProfile caps;
  std::optional<double> budget;
  std::vector<std::size_t> order;
  std::vector<BeliefModel> beliefs;
  PolicyRule policy_rule = PolicyRule::Equilibrium;
  std::vector<ConditionalPolicy> policies;  // PolicyRule::Fixed only
  std::vector<double> arrival_rates;
  std::size_t slots = 1;
  std::uint64_t seed = 0;
  FairnessParams fairness;

  SequentialGame game() const;
  ArrivalProcess arrivals() const { return ArrivalProcess(arrival_rates, seed); }
};

/// `seed_override` replaces the file's seed before any random market is
/// drawn; `caps_override` replaces `caps`.
Scenario parse_scenario(const std::string& text,
                        std::optional<std::uint64_t> seed_override = {},
                        std::optional<CountProfile> caps_override = {});

Scenario load_scenario(const std::filesystem::path& path,
                       std::optional<std::uint64_t> seed_override = {},
                       std::optional<CountProfile> caps_override = {});

/// The duopoly of the worked example: B_i = 5 at mean 0.2, B_j = 2 at mean
/// 0.5, N = 20, k = 2, caps (3, 3).
std::string example1_scenario_text();

/// "a,b,c" -> CountProfile.
CountProfile parse_caps(const std::string& text);

}  // namespace bribery
