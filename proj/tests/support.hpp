#pragma once

#include <cmath>
#include <random>

#include "bribery/core.hpp"

namespace bribery::testing {

inline Market example1_market() {
  return Market({SellerState::uniform("i", 5, 0.2), SellerState::uniform("j", 2, 0.5)},
                20, 2.0);
}

/// Independent evaluation of the count-model utility straight from the formula.
inline double formula_utility(double k, double omega1, double omega2, double pool,
                              double bribed_total, double mass, double raters,
                              double own) {
  const double mean = (mass + own) / (raters + own);
  return k * omega1 * (pool - bribed_total) * std::pow(mean, omega2);
}

}  // namespace bribery::testing

#include <algorithm>
#include <optional>

namespace bribery::testing {

/// Random strategy of exactly `cost` that never pushes a rating past 1:
/// every effort fits the headroom of its target. Returns nullopt when the
/// available headroom cannot absorb the cost.
inline std::optional<EffortStrategy> random_non_wasteful(std::mt19937_64& rng,
                                                         const SellerState& seller,
                                                         std::size_t fresh_available,
                                                         double cost) {
  struct Target {
    BuyerRef ref;
    double room;
  };
  std::vector<Target> targets;
  const auto ratings = seller.ratings();
  for (std::size_t r = 0; r < ratings.size(); ++r) {
    if (ratings[r].value() < 1.0) {
      targets.push_back({BuyerRef::rater(seller.id(), r), 1.0 - ratings[r].value()});
    }
  }
  for (std::size_t n = 0; n < fresh_available; ++n) targets.push_back({BuyerRef::fresh(n), 1.0});
  std::shuffle(targets.begin(), targets.end(), rng);

  std::vector<double> alloc(targets.size(), 0.0);
  double left = cost;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double share = unit(rng) * std::min(targets[t].room, left);
    alloc[t] += share;
    left -= share;
  }
  for (std::size_t t = 0; t < targets.size() && left > 0.0; ++t) {
    const double add = std::min(targets[t].room - alloc[t], left);
    alloc[t] += add;
    left -= add;
  }
  if (left > 1e-12) return std::nullopt;
  EffortStrategy out;
  for (std::size_t t = 0; t < targets.size(); ++t) out.set(targets[t].ref, alloc[t]);
  return out;
}

}  // namespace bribery::testing
