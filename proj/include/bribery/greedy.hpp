#pragma once

#include <cstddef>

#include "bribery/core.hpp"

namespace bribery {

class Budget {
 public:
  explicit Budget(double amount);
  double amount() const { return amount_; }

 private:
  double amount_;
};

/// Greedy bribing: top up the lowest ratings to 1 first (ties by original
/// index), then spend whatever is left on up to `fresh_pool` fresh buyers,
/// min(1, remaining) each.
EffortStrategy greedy_strategy(const SellerState& seller,
                               std::size_t fresh_pool, Budget budget);

/// rater_count / pool < k. Throws NoPotentialBuyers when the pool is empty.
bool is_profitable_regime(const Market& market, std::size_t seller);

enum class DominanceVerdict { StrictlyDominates, WeaklyDominates, Incomparable };

const char* to_string(DominanceVerdict verdict);

/// Does own count `a` dominate own count `b` for `seller`, over every
/// opponent combination within `caps` for which both profiles are feasible?
DominanceVerdict dominates(const Market& market, std::size_t seller,
                           std::size_t a, std::size_t b,
                           const CountProfile& caps);

}  // namespace bribery
