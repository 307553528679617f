#include "bribery/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>

namespace bribery {

namespace {

constexpr double kWeightTolerance = 1e-12;

/// fn(history) for every history of length `length` within the caps of the
/// first `length` movers.
void for_each_history(const SequentialGame& game, std::size_t length,
                      const std::function<void(const History&)>& fn) {
  History h(length, 0);
  while (true) {
    fn(h);
    std::size_t q = length;
    while (q-- > 0) {
      if (h[q] < game.caps[game.order[q]]) {
        ++h[q];
        break;
      }
      h[q] = 0;
    }
    if (q == static_cast<std::size_t>(-1)) return;
  }
}

CountProfile to_profile(const SequentialGame& game, const History& full) {
  CountProfile profile = CountProfile::zeros(game.market.size());
  for (std::size_t q = 0; q < full.size(); ++q) profile[game.order[q]] = full[q];
  return profile;
}

double believed_payoff(const SequentialGame& game, std::size_t seller,
                       const CountProfile& profile) {
  double sum = 0.0;
  for (const auto& [pool, weight] :
       game.beliefs.at(seller).atoms(game.market.potential_buyers())) {
    sum += weight * payoff_under_pool(game.market, seller, profile, pool);
  }
  return sum;
}

double utility_or_zero(const Market& market, std::size_t seller,
                       const CountProfile& profile) {
  if (market.seller(seller).rater_count() + profile[seller] == 0) return 0.0;
  return utility(market, seller, profile);
}

/// Lowest count whose value is within tolerance of the maximum over
/// counts 0..limit.
std::size_t lowest_argmax(const std::vector<double>& values, std::size_t limit) {
  limit = std::min(limit, values.size() - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c <= limit; ++c) best = std::max(best, values[c]);
  for (std::size_t c = 0; c <= limit; ++c) {
    if (values[c] >= best - kPayoffTolerance) return c;
  }
  return 0;
}

History follow_plan(const SequentialGame& game, const SequentialPlan& plan,
                    History h) {
  while (h.size() < game.order.size()) {
    h.push_back(plan.plan[h.size()].at(h));
  }
  return h;
}

/// Value for the mover at position p of each own count, later movers
/// following the plan.
std::vector<double> planned_values(const SequentialGame& game,
                                   const SequentialPlan& plan, std::size_t p,
                                   const History& h) {
  const std::size_t seller = game.order[p];
  std::vector<double> values;
  for (std::size_t c = 0; c <= game.caps[seller]; ++c) {
    History next = h;
    next.push_back(c);
    const auto full = follow_plan(game, plan, std::move(next));
    values.push_back(believed_payoff(game, seller, to_profile(game, full)));
  }
  return values;
}

}  // namespace

ArrivalProcess::ArrivalProcess(std::vector<double> rate_schedule,
                               std::uint64_t seed)
    : rates_(std::move(rate_schedule)), seed_(seed) {
  for (double r : rates_) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw InvalidInput("arrival rates must be finite and non-negative");
    }
  }
}

double ArrivalProcess::rate_at(std::size_t slot) const {
  if (rates_.empty()) return 0.0;
  return rates_[std::min(slot, rates_.size() - 1)];
}

std::vector<std::uint64_t> sample_arrivals(const ArrivalProcess& process,
                                           std::size_t slots) {
  std::mt19937_64 rng(process.seed());
  std::vector<std::uint64_t> out;
  out.reserve(slots);
  for (std::size_t t = 0; t < slots; ++t) {
    const double rate = process.rate_at(t);
    if (rate == 0.0) {
      out.push_back(0);
      continue;
    }
    std::poisson_distribution<std::uint64_t> dist(rate);
    out.push_back(dist(rng));
  }
  return out;
}

BeliefModel::BeliefModel(std::vector<std::int64_t> support,
                         std::vector<double> weights, Anchor anchor)
    : support_(std::move(support)), weights_(std::move(weights)), anchor_(anchor) {
  if (support_.empty() || support_.size() != weights_.size()) {
    throw InvalidInput("belief support and weights must be non-empty and equal length");
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < weights_.size(); ++a) {
    if (!(weights_[a] >= 0.0) || !std::isfinite(weights_[a])) {
      throw InvalidInput("belief weights must be non-negative");
    }
    if (anchor_ == Anchor::Absolute && support_[a] < 0) {
      throw InvalidInput("absolute belief support must be non-negative");
    }
    sum += weights_[a];
  }
  if (std::abs(sum - 1.0) > kWeightTolerance) {
    throw InvalidInput("belief weights sum to " + std::to_string(sum) +
                       ", expected 1");
  }
}

std::vector<std::pair<std::size_t, double>> BeliefModel::atoms(
    std::size_t true_pool) const {
  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t a = 0; a < support_.size(); ++a) {
    std::int64_t pool = support_[a];
    if (anchor_ == Anchor::RelativeToTrue) {
      pool = std::max<std::int64_t>(0, static_cast<std::int64_t>(true_pool) + pool);
    }
    out.emplace_back(static_cast<std::size_t>(pool), weights_[a]);
  }
  return out;
}

void validate(const SequentialGame& game, bool require_policies) {
  const std::size_t m = game.market.size();
  if (game.caps.size() != m) throw InvalidInput("caps do not match seller count");
  if (game.beliefs.size() != m) throw InvalidInput("one belief per seller required");
  std::vector<std::size_t> sorted = game.order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> identity(m);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  if (sorted != identity) {
    throw InvalidInput("move order must be a permutation of the sellers");
  }
  if (!require_policies) return;
  if (game.policies.size() != m) throw InvalidInput("one policy per seller required");
  for (std::size_t p = 0; p < m; ++p) {
    const std::size_t seller = game.order[p];
    for_each_history(game, p, [&](const History& h) {
      auto it = game.policies[seller].find(h);
      if (it == game.policies[seller].end()) {
        throw InvalidInput("seller '" + game.market.seller(seller).id() +
                           "' has no policy after history of length " +
                           std::to_string(h.size()));
      }
      const auto& dist = it->second;
      if (dist.size() != game.caps[seller] + 1) {
        throw InvalidInput("policy distribution length must be cap + 1");
      }
      double sum = 0.0;
      for (double w : dist) {
        if (!(w >= 0.0)) throw InvalidInput("policy probabilities must be non-negative");
        sum += w;
      }
      if (std::abs(sum - 1.0) > kWeightTolerance) {
        throw InvalidInput("policy distribution does not sum to 1");
      }
    });
  }
}

std::size_t position_in_order(const SequentialGame& game, std::size_t seller) {
  auto it = std::find(game.order.begin(), game.order.end(), seller);
  if (it == game.order.end()) {
    throw InvalidInput("seller " + std::to_string(seller) + " is not in the move order");
  }
  return static_cast<std::size_t>(it - game.order.begin());
}

ConditionalPolicy make_policy(
    const SequentialGame& game, std::size_t seller,
    const std::function<Distribution(const History&)>& rule) {
  ConditionalPolicy policy;
  for_each_history(game, position_in_order(game, seller),
                   [&](const History& h) { policy[h] = rule(h); });
  return policy;
}

Distribution point_mass_distribution(std::size_t cap, std::size_t count) {
  Distribution d(cap + 1, 0.0);
  d[std::min(count, cap)] = 1.0;
  return d;
}

Distribution uniform_distribution(std::size_t cap) {
  return Distribution(cap + 1, 1.0 / static_cast<double>(cap + 1));
}

std::vector<ConditionalPolicy> fixed_profile_policies(const SequentialGame& game,
                                                      const CountProfile& profile) {
  std::vector<ConditionalPolicy> out;
  for (std::size_t i = 0; i < game.market.size(); ++i) {
    const auto d = point_mass_distribution(game.caps[i], profile[i]);
    out.push_back(make_policy(game, i, [&](const History&) { return d; }));
  }
  return out;
}

std::vector<ConditionalPolicy> uniform_policies(const SequentialGame& game) {
  std::vector<ConditionalPolicy> out;
  for (std::size_t i = 0; i < game.market.size(); ++i) {
    const auto d = uniform_distribution(game.caps[i]);
    out.push_back(make_policy(game, i, [&](const History&) { return d; }));
  }
  return out;
}

double payoff_under_pool(const Market& market, std::size_t seller,
                         const CountProfile& profile, std::size_t pool) {
  const Market m = market.with_potential_buyers(pool);
  const auto zeros = CountProfile::zeros(m.size());
  const double u0 = utility_or_zero(m, seller, zeros);
  const double u = profile.total() > pool ? 0.0 : utility_or_zero(m, seller, profile);
  return u - u0 - count_cost(profile, seller);
}

std::vector<double> expected_payoff(const SequentialGame& game,
                                    std::size_t seller, const History& history) {
  const std::size_t pos = position_in_order(game, seller);
  if (history.size() != pos) {
    throw InvalidInput("history has " + std::to_string(history.size()) +
                       " moves but the seller moves at position " +
                       std::to_string(pos));
  }
  for (std::size_t q = 0; q < history.size(); ++q) {
    if (history[q] > game.caps[game.order[q]]) {
      throw InvalidInput("history exceeds an earlier mover's cap");
    }
  }
  const std::size_t m = game.order.size();

  std::function<double(History&, double)> recurse = [&](History& h, double prob) {
    if (h.size() == m) return prob * believed_payoff(game, seller, to_profile(game, h));
    const std::size_t mover = game.order[h.size()];
    if (mover >= game.policies.size()) {
      throw InvalidInput("no policy for seller '" + game.market.seller(mover).id() + "'");
    }
    const auto it = game.policies[mover].find(h);
    if (it == game.policies[mover].end()) {
      throw InvalidInput("seller '" + game.market.seller(mover).id() +
                         "' has no policy for the observed history");
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < it->second.size(); ++c) {
      const double w = it->second[c];
      if (w <= 0.0) continue;
      h.push_back(c);
      sum += recurse(h, prob * w);
      h.pop_back();
    }
    return sum;
  };

  std::vector<double> out;
  for (std::size_t c = 0; c <= game.caps[seller]; ++c) {
    History h = history;
    h.push_back(c);
    out.push_back(recurse(h, 1.0));
  }
  return out;
}

std::vector<std::size_t> bayesian_best_response(const SequentialGame& game,
                                                std::size_t seller,
                                                const History& history) {
  const auto values = expected_payoff(game, seller, history);
  const double best = *std::max_element(values.begin(), values.end());
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < values.size(); ++c) {
    if (values[c] >= best - kPayoffTolerance) out.push_back(c);
  }
  return out;
}

SequentialPlan solve_sequential(const SequentialGame& game,
                                const TreeLimits& limits) {
  validate(game, false);
  const std::size_t m = game.order.size();
  std::size_t leaves = 1;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t width = game.caps[i] + 1;
    if (leaves > limits.max_leaves / width) {
      throw SizeBoundExceeded("sequential game leaves",
                              std::numeric_limits<std::size_t>::max(),
                              limits.max_leaves);
    }
    leaves *= width;
  }
  if (leaves > limits.max_leaves) {
    throw SizeBoundExceeded("sequential game leaves", leaves, limits.max_leaves);
  }

  SequentialPlan plan;
  plan.plan.resize(m);
  for (std::size_t p = m; p-- > 0;) {
    for_each_history(game, p, [&](const History& h) {
      const auto values = planned_values(game, plan, p, h);
      plan.plan[p][h] = lowest_argmax(values, values.size() - 1);
    });
  }
  plan.path = follow_plan(game, plan, {});
  plan.path_profile = to_profile(game, plan.path);
  for (std::size_t i = 0; i < game.market.size(); ++i) {
    plan.path_payoffs.push_back(believed_payoff(game, i, plan.path_profile));
  }
  if (!is_deviation_proof(game, plan)) {
    throw NonConvergence("backward induction produced a deviation-prone plan");
  }
  return plan;
}

bool is_deviation_proof(const SequentialGame& game, const SequentialPlan& plan) {
  for (std::size_t p = 0; p < plan.plan.size(); ++p) {
    for (const auto& [h, chosen] : plan.plan[p]) {
      const auto values = planned_values(game, plan, p, h);
      for (double v : values) {
        if (v > values.at(chosen) + kPayoffTolerance) return false;
      }
    }
  }
  return true;
}

Trace simulate(const SequentialGame& game, const ArrivalProcess& process,
               std::size_t slots, PolicyRule rule) {
  validate(game, rule == PolicyRule::Fixed);
  const std::size_t m = game.market.size();
  const auto arrivals = sample_arrivals(process, slots);
  Trace trace{{}, {}, game.market};
  for (const auto& s : game.market.sellers()) trace.seller_ids.push_back(s.id());

  for (std::size_t t = 0; t < slots; ++t) {
    Market market = trace.final_market.with_total_buyers(
        trace.final_market.total_buyers() + arrivals[t]);
    const std::size_t pool = market.potential_buyers();

    CountProfile caps = game.caps;
    for (std::size_t i = 0; i < m; ++i) caps[i] = std::min(caps[i], pool);
    SequentialGame slot_game{market, game.order, caps, game.beliefs, {}};
    switch (rule) {
      case PolicyRule::Fixed:
        slot_game.policies = game.policies;
        break;
      case PolicyRule::Equilibrium:
        slot_game.policies =
            fixed_profile_policies(slot_game, static_solution(market, caps));
        break;
      case PolicyRule::Uniform:
        slot_game.policies = uniform_policies(slot_game);
        break;
    }

    History h;
    std::size_t taken = 0;
    for (std::size_t p = 0; p < m; ++p) {
      const std::size_t seller = game.order[p];
      const auto values = expected_payoff(slot_game, seller, h);
      const std::size_t c = lowest_argmax(values, pool - taken);
      h.push_back(c);
      taken += c;
    }
    const CountProfile profile = to_profile(slot_game, h);

    TraceRow row;
    row.slot = t + 1;
    row.arrivals = arrivals[t];
    row.potential_buyers = pool;
    row.total_buyers = market.total_buyers();
    row.counts = profile;
    for (std::size_t i = 0; i < m; ++i) {
      row.utilities.push_back(utility_or_zero(market, i, profile));
    }
    trace.rows.push_back(std::move(row));
    trace.final_market = market.after_bribes(profile);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "slot,arrivals";
  for (const auto& id : trace.seller_ids) os << ",count_" << id;
  for (const auto& id : trace.seller_ids) os << ",utility_" << id;
  os << ",potential_buyers\n";
  const auto precision = os.precision();
  os << std::setprecision(12);
  for (const auto& row : trace.rows) {
    os << row.slot << ',' << row.arrivals;
    for (std::size_t i = 0; i < row.counts.size(); ++i) os << ',' << row.counts[i];
    for (double u : row.utilities) os << ',' << u;
    os << ',' << row.potential_buyers << '\n';
  }
  os.precision(precision);
}

}  // namespace bribery
