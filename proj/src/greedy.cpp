#include "bribery/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bribery {

namespace {
// Residual budget below this is rounding noise from the top-up phase.
constexpr double kBudgetEpsilon = 1e-12;
}  // namespace

Budget::Budget(double amount) : amount_(amount) {
  if (!(amount >= 0.0) || !std::isfinite(amount)) {
    throw InvalidInput("budget must be a finite non-negative number");
  }
}

EffortStrategy greedy_strategy(const SellerState& seller,
                               std::size_t fresh_pool, Budget budget) {
  EffortStrategy strategy;
  double remaining = budget.amount();
  const auto ratings = seller.ratings();

  std::vector<std::size_t> order(ratings.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ratings[a].value() < ratings[b].value();
  });

  for (std::size_t idx : order) {
    if (remaining <= kBudgetEpsilon) break;
    const double r = ratings[idx].value();
    if (r < 1.0) {
      const double effort = std::min(1.0 - r, remaining);
      strategy.set(BuyerRef::rater(seller.id(), idx), effort);
      remaining -= effort;
    }
  }
  for (std::size_t n = 0; n < fresh_pool && remaining > kBudgetEpsilon; ++n) {
    const double effort = std::min(1.0, remaining);
    strategy.set(BuyerRef::fresh(n), effort);
    remaining -= effort;
  }
  return strategy;
}

bool is_profitable_regime(const Market& market, std::size_t seller) {
  const std::size_t pool = market.potential_buyers();
  if (pool == 0) {
    throw NoPotentialBuyers("market has no potential buyers");
  }
  const double ratio = static_cast<double>(market.seller(seller).rater_count()) /
                       static_cast<double>(pool);
  return ratio < market.profit_per_purchase();
}

const char* to_string(DominanceVerdict verdict) {
  switch (verdict) {
    case DominanceVerdict::StrictlyDominates: return "strictly-dominates";
    case DominanceVerdict::WeaklyDominates: return "weakly-dominates";
    case DominanceVerdict::Incomparable: return "incomparable";
  }
  return "?";
}

DominanceVerdict dominates(const Market& market, std::size_t seller,
                           std::size_t a, std::size_t b,
                           const CountProfile& caps) {
  if (caps.size() != market.size()) {
    throw InvalidInput("caps size does not match seller count");
  }
  if (a > caps[seller] || b > caps[seller]) {
    throw InvalidInput("compared counts exceed the seller's cap");
  }
  bool strict_everywhere = true;
  bool any = false;
  CountProfile opp = CountProfile::zeros(market.size());
  const std::size_t pool = market.potential_buyers();

  // Odometer over opponents' counts.
  while (true) {
    const std::size_t others = opp.total_except(seller);
    if (others + std::max(a, b) <= pool) {
      any = true;
      const double pa = payoff(market, seller, opp.with(seller, a));
      const double pb = payoff(market, seller, opp.with(seller, b));
      if (pa < pb - kPayoffTolerance) return DominanceVerdict::Incomparable;
      if (pa <= pb + kPayoffTolerance) strict_everywhere = false;
    }
    std::size_t j = 0;
    for (; j < opp.size(); ++j) {
      if (j == seller) continue;
      if (opp[j] < caps[j]) {
        ++opp[j];
        break;
      }
      opp[j] = 0;
    }
    if (j == opp.size()) break;
  }
  if (!any) return DominanceVerdict::Incomparable;
  return strict_everywhere ? DominanceVerdict::StrictlyDominates
                           : DominanceVerdict::WeaklyDominates;
}

}  // namespace bribery
