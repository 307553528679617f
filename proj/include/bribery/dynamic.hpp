#pragma once

// The bribery game under uncertainty. Sellers move in a fixed order, each
// observing the counts chosen before it, holding a belief over the number of
// potential buyers and a conjecture (conditional policy) about how later
// movers react. Potential buyers arrive per time slot as Poisson draws.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "bribery/core.hpp"
#include "bribery/equilibrium.hpp"

namespace bribery {

/// Poisson arrivals with a per-slot rate. Slots past the end of the schedule
/// reuse the last rate; an empty schedule means rate 0.
class ArrivalProcess {
 public:
  ArrivalProcess(std::vector<double> rate_schedule, std::uint64_t seed);
  static ArrivalProcess constant(double rate, std::uint64_t seed) {
    return ArrivalProcess({rate}, seed);
  }
  double rate_at(std::size_t slot) const;
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& rate_schedule() const { return rates_; }

 private:
  std::vector<double> rates_;
  std::uint64_t seed_;
};

std::vector<std::uint64_t> sample_arrivals(const ArrivalProcess& process,
                                           std::size_t slots);

/// Finite-support belief over the number of potential buyers. With
/// Anchor::RelativeToTrue the support holds offsets from the actual pool
/// (clamped at zero), so a point mass at offset 0 tracks the truth.
class BeliefModel {
 public:
  enum class Anchor { Absolute, RelativeToTrue };

  BeliefModel(std::vector<std::int64_t> support, std::vector<double> weights,
              Anchor anchor = Anchor::Absolute);
  static BeliefModel point_mass(std::size_t pool) {
    return BeliefModel({static_cast<std::int64_t>(pool)}, {1.0});
  }
  static BeliefModel truth() {
    return BeliefModel({0}, {1.0}, Anchor::RelativeToTrue);
  }

  Anchor anchor() const { return anchor_; }
  const std::vector<std::int64_t>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

  /// (pool, weight) atoms given the actual pool.
  std::vector<std::pair<std::size_t, double>> atoms(std::size_t true_pool) const;

 private:
  std::vector<std::int64_t> support_;
  std::vector<double> weights_;
  Anchor anchor_;
};

/// Counts chosen by the movers so far, in move order.
using History = std::vector<std::size_t>;
/// Probability per own count, index = count.
using Distribution = std::vector<double>;
using ConditionalPolicy = std::map<History, Distribution>;

struct SequentialGame {
  Market market;
  std::vector<std::size_t> order;  // seller indices, first mover first
  CountProfile caps;
  std::vector<BeliefModel> beliefs;         // per seller index
  std::vector<ConditionalPolicy> policies;  // per seller index
};

/// Checks order/caps/beliefs shapes; with `require_policies`, also that
/// every reachable history of every mover has a normalized distribution.
void validate(const SequentialGame& game, bool require_policies);

std::size_t position_in_order(const SequentialGame& game, std::size_t seller);

/// Builds the table for `seller` by calling rule(history) on every history
/// reachable under caps at the seller's position.
ConditionalPolicy make_policy(
    const SequentialGame& game, std::size_t seller,
    const std::function<Distribution(const History&)>& rule);

Distribution point_mass_distribution(std::size_t cap, std::size_t count);
Distribution uniform_distribution(std::size_t cap);

/// Every seller is believed to play its count in `profile`, whatever it
/// observes. With profile = static solution these are the full-information
/// policies.
std::vector<ConditionalPolicy> fixed_profile_policies(const SequentialGame& game,
                                                      const CountProfile& profile);
std::vector<ConditionalPolicy> uniform_policies(const SequentialGame& game);

/// Static payoff with the pool replaced by `pool`. Bribes beyond the pool
/// leave nobody to sell to; a seller with no raters at all has utility 0.
double payoff_under_pool(const Market& market, std::size_t seller,
                         const CountProfile& profile, std::size_t pool);

/// Expected payoff of `seller` for each own count 0..cap, given the counts
/// of the earlier movers. Expectation runs over later movers' conditional
/// policies and the seller's belief. Throws InvalidInput for a missing
/// distribution.
std::vector<double> expected_payoff(const SequentialGame& game,
                                    std::size_t seller, const History& history);

/// Argmax set of expected_payoff, ascending.
std::vector<std::size_t> bayesian_best_response(const SequentialGame& game,
                                                std::size_t seller,
                                                const History& history);

struct SequentialPlan {
  /// plan[position][history] = chosen count of the mover at that position.
  std::vector<std::map<History, std::size_t>> plan;
  History path;               // realized counts in move order
  CountProfile path_profile;  // realized counts by seller index
  /// Each seller's belief-expected payoff along the path.
  std::vector<double> path_payoffs;
};

struct TreeLimits {
  std::size_t max_leaves = std::size_t{1} << 20;
};

/// Backward induction. Later movers' plans replace their conditional
/// policies; ties go to the lowest count.
SequentialPlan solve_sequential(const SequentialGame& game,
                                const TreeLimits& limits = {});

/// No mover gains more than the payoff tolerance by changing its count at
/// any single history, given the plan elsewhere.
bool is_deviation_proof(const SequentialGame& game, const SequentialPlan& plan);

enum class PolicyRule {
  Fixed,        // use game.policies as given
  Equilibrium,  // point mass on the slot's static solution
  Uniform,
};

struct TraceRow {
  std::size_t slot = 0;
  std::uint64_t arrivals = 0;
  std::size_t potential_buyers = 0;  // after arrivals, before bribes
  std::size_t total_buyers = 0;
  CountProfile counts;
  std::vector<double> utilities;  // after the slot's bribes
};

struct Trace {
  std::vector<std::string> seller_ids;
  std::vector<TraceRow> rows;
  Market final_market;
};

/// Each slot: arrivals join the market, sellers move in order with their
/// Bayesian best response (lowest on ties, never more than the buyers left),
/// bribed buyers become raters at 1.
Trace simulate(const SequentialGame& game, const ArrivalProcess& process,
               std::size_t slots, PolicyRule rule = PolicyRule::Equilibrium);

/// slot, arrivals, count_<id>..., utility_<id>..., potential_buyers
void write_trace_csv(std::ostream& os, const Trace& trace);

}  // namespace bribery
