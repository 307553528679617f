#include "bribery/fairness.hpp"

#include <algorithm>
#include <cmath>

#include "bribery/greedy.hpp"

namespace bribery {

FairCohort::FairCohort(std::size_t count, double mean_rating)
    : count_(count), mean_(mean_rating) {
  if (!(mean_rating >= 0.0 && mean_rating <= 1.0)) {
    throw InvalidInput("fair mean rating must lie in [0, 1]");
  }
}

double utility_with_fair(const Market& market, std::size_t seller,
                         const FairCohort& cohort) {
  const std::size_t pool = market.potential_buyers();
  if (cohort.count() > pool) {
    throw InvalidInput("fair cohort of " + std::to_string(cohort.count()) +
                       " exceeds the " + std::to_string(pool) +
                       " potential buyers");
  }
  const auto& s = market.seller(seller);
  const std::size_t raters = s.rater_count() + cohort.count();
  if (raters == 0) {
    throw UndefinedMean("seller '" + s.id() + "' has no raters; mean undefined");
  }
  const double mean = (s.rating_mass() + cohort.mass()) / static_cast<double>(raters);
  const double k = market.profit_per_purchase();
  return k * market.snowball_scale() *
             static_cast<double>(pool - cohort.count()) *
             std::pow(mean, market.snowball_exponent()) +
         k * static_cast<double>(cohort.count());
}

Market with_fair_cohort(const Market& market, std::size_t seller,
                        const FairCohort& cohort) {
  if (cohort.count() > market.potential_buyers()) {
    throw InvalidInput("fair cohort exceeds the potential buyers");
  }
  return market.with_seller(
      seller, market.seller(seller).with_added_raters(cohort.count(),
                                                      cohort.mean_rating()));
}

double max_bribery_payoff(const Market& market, std::size_t seller) {
  CountProfile profile = CountProfile::zeros(market.size());
  double best = 0.0;  // count 0 always pays exactly 0
  for (std::size_t c = 1; c <= market.potential_buyers(); ++c) {
    profile[seller] = c;
    best = std::max(best, payoff(market, seller, profile));
  }
  return best;
}

bool is_bribery_proof(const Market& market, std::size_t seller) {
  return market.potential_buyers() == 0 ||
         max_bribery_payoff(market, seller) <= kPayoffTolerance;
}

std::optional<std::size_t> min_fair_raters_for_proofness(const Market& market,
                                                         std::size_t seller,
                                                         double fair_mean,
                                                         std::size_t cap) {
  if (cap > market.potential_buyers()) {
    throw InvalidInput("cohort cap exceeds the potential buyers");
  }
  for (std::size_t c = 0; c <= cap; ++c) {
    const Market installed = with_fair_cohort(market, seller, FairCohort(c, fair_mean));
    if (is_bribery_proof(installed, seller)) return c;
  }
  return std::nullopt;
}

QuadraticRoots critical_point_paper(const Market& market, std::size_t seller,
                                    double fair_mean) {
  const double pool = static_cast<double>(market.potential_buyers());
  const double raters = static_cast<double>(market.seller(seller).rater_count());
  const double b = -fair_mean;
  const double c = pool * (raters + fair_mean);
  QuadraticRoots out;
  out.discriminant = b * b - 4.0 * c;
  if (out.discriminant < 0.0) return out;
  if (out.discriminant == 0.0) {
    out.double_root = true;
    out.roots = {-b / 2.0};
    return out;
  }
  const double sq = std::sqrt(out.discriminant);
  // Numerically stable pair.
  const double q = -0.5 * (b + std::copysign(sq, b == 0.0 ? 1.0 : b));
  double r1 = q;
  double r2 = q != 0.0 ? c / q : -b - q;
  if (r1 > r2) std::swap(r1, r2);
  out.roots = {r1, r2};
  return out;
}

}  // namespace bribery
