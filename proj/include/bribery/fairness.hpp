#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "bribery/core.hpp"

namespace bribery {

/// Honest raters whose ratings cannot be bribed.
class FairCohort {
 public:
  FairCohort(std::size_t count, double mean_rating);
  std::size_t count() const { return count_; }
  double mean_rating() const { return mean_; }
  double mass() const { return static_cast<double>(count_) * mean_; }

 private:
  std::size_t count_;
  double mean_;
};

/// Utility of a seller once a fair cohort has rated: the cohort's buyers
/// leave the pool, contribute their rating mass to the mean and each pay k.
///   k*O1*(pool - n_f) * ((mass + n_f*r_f) / (raters + n_f))^O2 + k*n_f
double utility_with_fair(const Market& market, std::size_t seller,
                         const FairCohort& cohort);

/// Market with the cohort installed as raters of `seller`.
Market with_fair_cohort(const Market& market, std::size_t seller,
                        const FairCohort& cohort);

/// Best payoff over own counts 0..pool with every opponent at 0.
double max_bribery_payoff(const Market& market, std::size_t seller);

/// No count strategy earns more than the payoff tolerance.
bool is_bribery_proof(const Market& market, std::size_t seller);

/// Smallest cohort size c <= cap at fair_mean after which the seller is
/// bribery-proof, by exhaustive search; nullopt when none up to cap works.
std::optional<std::size_t> min_fair_raters_for_proofness(const Market& market,
                                                         std::size_t seller,
                                                         double fair_mean,
                                                         std::size_t cap);

/// Real roots of x^2 - r_f*x + pool*(raters + r_f) = 0, taken literally.
struct QuadraticRoots {
  double discriminant = 0.0;
  std::vector<double> roots;  // distinct, ascending
  bool double_root = false;
  bool as_printed = true;
};

QuadraticRoots critical_point_paper(const Market& market, std::size_t seller,
                                    double fair_mean);

}  // namespace bribery
