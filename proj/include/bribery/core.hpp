#pragma once

// Domain types and the utility/payoff algebra of the bribery game.
//
// A market holds M sellers, each with the ratings its interacted buyers gave,
// plus a pool of potential buyers who have not interacted with anyone yet.
// Sellers bribe fresh buyers (count model) or push existing ratings up
// (effort model); utility is proportional to the remaining pool and to the
// mean rating raised to the snowball exponent.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bribery {

/// Absolute tolerance used whenever two payoffs are compared.
inline constexpr double kPayoffTolerance = 1e-9;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class BriberyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition.
class InvalidInput : public BriberyError {
 public:
  using BriberyError::BriberyError;
};

/// Mean rating of a seller with no raters was requested by the utility.
class UndefinedMean : public BriberyError {
 public:
  using BriberyError::BriberyError;
};

/// No potential buyers left in the market.
class NoPotentialBuyers : public BriberyError {
 public:
  using BriberyError::BriberyError;
};

class NonConvergence : public BriberyError {
 public:
  using BriberyError::BriberyError;
};

class Infeasible : public BriberyError {
 public:
  using BriberyError::BriberyError;
};

/// An enumeration would exceed the configured cell/leaf bound.
class SizeBoundExceeded : public BriberyError {
 public:
  SizeBoundExceeded(const std::string& what, std::size_t requested,
                    std::size_t bound)
      : BriberyError(what + ": " + std::to_string(requested) +
                     " exceeds bound " + std::to_string(bound)),
        requested_(requested),
        bound_(bound) {}
  std::size_t requested() const { return requested_; }
  std::size_t bound() const { return bound_; }

 private:
  std::size_t requested_;
  std::size_t bound_;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A rating in [0, 1].
class Rating {
 public:
  explicit Rating(double value);
  double value() const { return value_; }
  auto operator<=>(const Rating&) const = default;

 private:
  double value_;
};

std::vector<Rating> to_ratings(std::span<const double> values);

class SellerState {
 public:
  /// rater_count defaults to the number of ratings.
  SellerState(std::string id, std::vector<Rating> ratings);
  SellerState(std::string id, std::vector<Rating> ratings,
              std::size_t rater_count);

  /// `count` raters all giving `mean`.
  static SellerState uniform(std::string id, std::size_t count, double mean);

  const std::string& id() const { return id_; }
  std::span<const Rating> ratings() const { return ratings_; }
  std::size_t rater_count() const { return rater_count_; }
  /// Sum of all ratings.
  double rating_mass() const;

  /// Copy with `extra` new raters who all gave `value`.
  SellerState with_added_raters(std::size_t extra, double value) const;

  bool operator==(const SellerState&) const = default;

 private:
  std::string id_;
  std::vector<Rating> ratings_;
  std::size_t rater_count_;
};

/// One non-negative bribe count per seller.
class CountProfile {
 public:
  CountProfile() = default;
  explicit CountProfile(std::vector<std::size_t> counts)
      : counts_(std::move(counts)) {}
  CountProfile(std::initializer_list<std::size_t> counts) : counts_(counts) {}

  static CountProfile zeros(std::size_t sellers) {
    return CountProfile(std::vector<std::size_t>(sellers, 0));
  }

  std::size_t size() const { return counts_.size(); }
  std::size_t operator[](std::size_t i) const { return counts_.at(i); }
  std::size_t& operator[](std::size_t i) { return counts_.at(i); }
  std::span<const std::size_t> counts() const { return counts_; }
  std::size_t total() const;
  /// Sum over every seller except `seller`.
  std::size_t total_except(std::size_t seller) const;
  CountProfile with(std::size_t seller, std::size_t count) const;

  auto operator<=>(const CountProfile&) const = default;

 private:
  std::vector<std::size_t> counts_;
};

std::string to_string(const CountProfile& profile);

class Market {
 public:
  Market(std::vector<SellerState> sellers, std::size_t total_buyers,
         double profit_per_purchase, double snowball_scale = 1.0,
         double snowball_exponent = 1.0);

  std::size_t size() const { return sellers_.size(); }
  const SellerState& seller(std::size_t i) const { return sellers_.at(i); }
  std::span<const SellerState> sellers() const { return sellers_; }
  std::size_t total_buyers() const { return total_buyers_; }
  double profit_per_purchase() const { return profit_; }
  double snowball_scale() const { return omega1_; }
  double snowball_exponent() const { return omega2_; }

  std::size_t interacted_buyers() const;
  /// Buyers that have not interacted with any seller.
  std::size_t potential_buyers() const;

  /// Seller index by id; throws InvalidInput when unknown.
  std::size_t index_of(const std::string& id) const;

  Market with_seller(std::size_t i, SellerState seller) const;
  Market with_total_buyers(std::size_t total) const;
  /// Same sellers, total adjusted so that potential_buyers() == pool.
  Market with_potential_buyers(std::size_t pool) const;
  /// Every seller gains profile[i] raters at rating 1 (bribed fresh buyers).
  Market after_bribes(const CountProfile& profile) const;

  bool feasible(const CountProfile& profile) const;

 private:
  std::vector<SellerState> sellers_;
  std::size_t total_buyers_;
  double profit_;
  double omega1_;
  double omega2_;
};

/// Target of an individual bribe: an existing rater of a given seller
/// (by position in that seller's rating list) or the n-th fresh buyer.
struct BuyerRef {
  enum class Kind { Rater, Fresh };
  Kind kind = Kind::Fresh;
  std::string owner;  // seller id; empty for fresh buyers
  std::size_t index = 0;

  static BuyerRef rater(std::string owner, std::size_t index) {
    return {Kind::Rater, std::move(owner), index};
  }
  static BuyerRef fresh(std::size_t ordinal) { return {Kind::Fresh, {}, ordinal}; }

  auto operator<=>(const BuyerRef&) const = default;
};

/// Per-buyer bribing effort. Zero efforts are not stored.
class EffortStrategy {
 public:
  void set(const BuyerRef& target, double effort);
  double effort(const BuyerRef& target) const;
  bool empty() const { return efforts_.empty(); }
  std::size_t size() const { return efforts_.size(); }
  std::size_t fresh_count() const;
  const std::map<BuyerRef, double>& efforts() const { return efforts_; }

 private:
  std::map<BuyerRef, double> efforts_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Arithmetic mean of the ratings, 0 for an empty list.
double mean_rating(const SellerState& seller);

/// Raises targeted ratings to min(1, x + effort); fresh targets become new
/// raters at min(1, effort), appended in ordinal order.
SellerState apply_effort(const SellerState& seller,
                         const EffortStrategy& strategy);

/// k * Omega1 * (pool - sum(profile)) * mean'^Omega2 with
/// mean' = (mass_i + c_i) / (rater_count_i + c_i).
double utility(const Market& market, std::size_t seller,
               const CountProfile& profile);

/// Utility at the all-zero profile.
double initial_utility(const Market& market, std::size_t seller);

double strategy_cost(const EffortStrategy& strategy);
/// Each bribed fresh buyer costs one unit of effort (0 -> 1).
double count_cost(const CountProfile& profile, std::size_t seller);

/// utility - cost (the convention of the duopoly bimatrix).
double net_utility(const Market& market, std::size_t seller,
                   const CountProfile& profile);
/// utility - initial utility - cost.
double payoff(const Market& market, std::size_t seller,
              const CountProfile& profile);

/// Payoff of an effort strategy for `seller` while the other sellers bribe
/// `opponents[j]` fresh buyers each (opponents[seller] is ignored).
double effort_payoff(const Market& market, std::size_t seller,
                     const EffortStrategy& strategy,
                     const CountProfile& opponents);

// ---------------------------------------------------------------------------
// Random markets for property runs and randomized scenarios
// ---------------------------------------------------------------------------

struct RandomMarketSpec {
  std::size_t min_sellers = 1;
  std::size_t max_sellers = 3;
  std::size_t min_total_buyers = 2;
  std::size_t max_total_buyers = 30;
  double min_profit = 0.5;
  double max_profit = 4.0;
  double snowball_exponent = 1.0;
};

/// Every seller gets at least one rater and the pool is never empty.
Market random_market(std::mt19937_64& rng, const RandomMarketSpec& spec = {});

}  // namespace bribery
