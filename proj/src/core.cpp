#include "bribery/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace bribery {

Rating::Rating(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidInput("rating " + std::to_string(value) +
                       " outside [0, 1]");
  }
}

std::vector<Rating> to_ratings(std::span<const double> values) {
  std::vector<Rating> out;
  out.reserve(values.size());
  for (double v : values) out.emplace_back(v);
  return out;
}

SellerState::SellerState(std::string id, std::vector<Rating> ratings)
    : SellerState(std::move(id), ratings, ratings.size()) {}

SellerState::SellerState(std::string id, std::vector<Rating> ratings,
                         std::size_t rater_count)
    : id_(std::move(id)), ratings_(std::move(ratings)), rater_count_(rater_count) {
  if (ratings_.size() > rater_count_) {
    throw InvalidInput("seller '" + id_ + "' has " +
                       std::to_string(ratings_.size()) +
                       " ratings but only " + std::to_string(rater_count_) +
                       " raters");
  }
}

SellerState SellerState::uniform(std::string id, std::size_t count,
                                 double mean) {
  return SellerState(std::move(id), std::vector<Rating>(count, Rating(mean)));
}

double SellerState::rating_mass() const {
  double sum = 0.0;
  for (const auto& r : ratings_) sum += r.value();
  return sum;
}

SellerState SellerState::with_added_raters(std::size_t extra,
                                           double value) const {
  auto ratings = ratings_;
  ratings.insert(ratings.end(), extra, Rating(value));
  return SellerState(id_, std::move(ratings), rater_count_ + extra);
}

std::size_t CountProfile::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t CountProfile::total_except(std::size_t seller) const {
  return total() - counts_.at(seller);
}

CountProfile CountProfile::with(std::size_t seller, std::size_t count) const {
  CountProfile copy = *this;
  copy.counts_.at(seller) = count;
  return copy;
}

std::string to_string(const CountProfile& profile) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i) os << ',';
    os << profile[i];
  }
  os << ')';
  return os.str();
}

Market::Market(std::vector<SellerState> sellers, std::size_t total_buyers,
               double profit_per_purchase, double snowball_scale,
               double snowball_exponent)
    : sellers_(std::move(sellers)),
      total_buyers_(total_buyers),
      profit_(profit_per_purchase),
      omega1_(snowball_scale),
      omega2_(snowball_exponent) {
  if (!(profit_ > 0.0) || !std::isfinite(profit_)) {
    throw InvalidInput("profit per purchase must be positive");
  }
  if (!(omega1_ > 0.0) || !std::isfinite(omega1_)) {
    throw InvalidInput("snowball scale must be positive");
  }
  if (!(omega2_ > 0.0) || !std::isfinite(omega2_)) {
    throw InvalidInput("snowball exponent must be positive");
  }
  if (interacted_buyers() > total_buyers_) {
    throw InvalidInput("sellers have " + std::to_string(interacted_buyers()) +
                       " raters in total but the market only has " +
                       std::to_string(total_buyers_) + " buyers");
  }
  for (std::size_t i = 0; i < sellers_.size(); ++i) {
    for (std::size_t j = i + 1; j < sellers_.size(); ++j) {
      if (sellers_[i].id() == sellers_[j].id()) {
        throw InvalidInput("duplicate seller id '" + sellers_[i].id() + "'");
      }
    }
  }
}

std::size_t Market::interacted_buyers() const {
  std::size_t n = 0;
  for (const auto& s : sellers_) n += s.rater_count();
  return n;
}

std::size_t Market::potential_buyers() const {
  return total_buyers_ - interacted_buyers();
}

std::size_t Market::index_of(const std::string& id) const {
  for (std::size_t i = 0; i < sellers_.size(); ++i) {
    if (sellers_[i].id() == id) return i;
  }
  throw InvalidInput("unknown seller '" + id + "'");
}

Market Market::with_seller(std::size_t i, SellerState seller) const {
  auto sellers = sellers_;
  sellers.at(i) = std::move(seller);
  return Market(std::move(sellers), total_buyers_, profit_, omega1_, omega2_);
}

Market Market::with_total_buyers(std::size_t total) const {
  return Market(sellers_, total, profit_, omega1_, omega2_);
}

Market Market::with_potential_buyers(std::size_t pool) const {
  return with_total_buyers(interacted_buyers() + pool);
}

Market Market::after_bribes(const CountProfile& profile) const {
  if (profile.size() != sellers_.size()) {
    throw InvalidInput("profile size does not match seller count");
  }
  if (!feasible(profile)) {
    throw Infeasible("profile " + to_string(profile) +
                     " bribes more buyers than the pool holds");
  }
  auto sellers = sellers_;
  for (std::size_t i = 0; i < sellers.size(); ++i) {
    sellers[i] = sellers[i].with_added_raters(profile[i], 1.0);
  }
  return Market(std::move(sellers), total_buyers_, profit_, omega1_, omega2_);
}

bool Market::feasible(const CountProfile& profile) const {
  return profile.size() == sellers_.size() &&
         profile.total() <= potential_buyers();
}

void EffortStrategy::set(const BuyerRef& target, double effort) {
  if (!(effort >= 0.0) || !std::isfinite(effort)) {
    throw InvalidInput("effort must be a finite non-negative number");
  }
  if (effort == 0.0) {
    efforts_.erase(target);
  } else {
    efforts_[target] = effort;
  }
}

double EffortStrategy::effort(const BuyerRef& target) const {
  auto it = efforts_.find(target);
  return it == efforts_.end() ? 0.0 : it->second;
}

std::size_t EffortStrategy::fresh_count() const {
  return static_cast<std::size_t>(
      std::count_if(efforts_.begin(), efforts_.end(), [](const auto& kv) {
        return kv.first.kind == BuyerRef::Kind::Fresh;
      }));
}

double mean_rating(const SellerState& seller) {
  if (seller.ratings().empty()) return 0.0;
  return seller.rating_mass() / static_cast<double>(seller.ratings().size());
}

SellerState apply_effort(const SellerState& seller,
                         const EffortStrategy& strategy) {
  std::vector<Rating> ratings(seller.ratings().begin(), seller.ratings().end());
  std::vector<Rating> fresh;
  for (const auto& [target, effort] : strategy.efforts()) {
    if (target.kind == BuyerRef::Kind::Fresh) {
      fresh.emplace_back(std::min(1.0, effort));
      continue;
    }
    if (target.owner != seller.id()) {
      throw InvalidInput("bribe targets a rater of seller '" + target.owner +
                         "' but was applied to seller '" + seller.id() + "'");
    }
    if (target.index >= ratings.size()) {
      throw InvalidInput("seller '" + seller.id() + "' has no rater #" +
                         std::to_string(target.index));
    }
    ratings[target.index] =
        Rating(std::min(1.0, ratings[target.index].value() + effort));
  }
  const std::size_t raters = seller.rater_count() + fresh.size();
  ratings.insert(ratings.end(), fresh.begin(), fresh.end());
  return SellerState(seller.id(), std::move(ratings), raters);
}

namespace {

double utility_from(const Market& market, double pool, double mass,
                    std::size_t raters, const std::string& id) {
  if (raters == 0) {
    throw UndefinedMean("seller '" + id + "' has no raters; mean undefined");
  }
  const double mean = mass / static_cast<double>(raters);
  return market.profit_per_purchase() * market.snowball_scale() * pool *
         std::pow(mean, market.snowball_exponent());
}

void check_profile(const Market& market, std::size_t seller,
                   const CountProfile& profile) {
  if (seller >= market.size()) {
    throw InvalidInput("seller index " + std::to_string(seller) +
                       " out of range");
  }
  if (profile.size() != market.size()) {
    throw InvalidInput("profile " + to_string(profile) + " has " +
                       std::to_string(profile.size()) + " entries for " +
                       std::to_string(market.size()) + " sellers");
  }
  if (profile.total() > market.potential_buyers()) {
    throw Infeasible("profile " + to_string(profile) + " exceeds the " +
                     std::to_string(market.potential_buyers()) +
                     " potential buyers");
  }
}

}  // namespace

double utility(const Market& market, std::size_t seller,
               const CountProfile& profile) {
  check_profile(market, seller, profile);
  const auto& s = market.seller(seller);
  const double pool =
      static_cast<double>(market.potential_buyers() - profile.total());
  const double bribed = static_cast<double>(profile[seller]);
  return utility_from(market, pool, s.rating_mass() + bribed,
                      s.rater_count() + profile[seller], s.id());
}

double initial_utility(const Market& market, std::size_t seller) {
  return utility(market, seller, CountProfile::zeros(market.size()));
}

double strategy_cost(const EffortStrategy& strategy) {
  double sum = 0.0;
  for (const auto& [target, effort] : strategy.efforts()) sum += effort;
  return sum;
}

double count_cost(const CountProfile& profile, std::size_t seller) {
  return static_cast<double>(profile[seller]);
}

double net_utility(const Market& market, std::size_t seller,
                   const CountProfile& profile) {
  return utility(market, seller, profile) - count_cost(profile, seller);
}

double payoff(const Market& market, std::size_t seller,
              const CountProfile& profile) {
  return net_utility(market, seller, profile) - initial_utility(market, seller);
}

double effort_payoff(const Market& market, std::size_t seller,
                     const EffortStrategy& strategy,
                     const CountProfile& opponents) {
  check_profile(market, seller, opponents.with(seller, 0));
  const auto after = apply_effort(market.seller(seller), strategy);
  const std::size_t fresh = strategy.fresh_count();
  const std::size_t taken = fresh + opponents.total_except(seller);
  if (taken > market.potential_buyers()) {
    throw Infeasible("effort strategy bribes " + std::to_string(fresh) +
                     " fresh buyers but only " +
                     std::to_string(market.potential_buyers() -
                                    opponents.total_except(seller)) +
                     " remain");
  }
  const double pool = static_cast<double>(market.potential_buyers() - taken);
  const double u = utility_from(market, pool, after.rating_mass(),
                                after.rater_count(), after.id());
  return u - initial_utility(market, seller) - strategy_cost(strategy);
}

Market random_market(std::mt19937_64& rng, const RandomMarketSpec& spec) {
  std::uniform_int_distribution<std::size_t> seller_dist(spec.min_sellers,
                                                         spec.max_sellers);
  const std::size_t m = seller_dist(rng);
  const std::size_t lo = std::max(spec.min_total_buyers, m + 1);
  const std::size_t hi = std::max(lo, spec.max_total_buyers);
  const std::size_t total =
      std::uniform_int_distribution<std::size_t>(lo, hi)(rng);

  // Raters are drawn so that at least one potential buyer remains.
  std::size_t budget = total - 1 - m;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SellerState> sellers;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t extra =
        std::uniform_int_distribution<std::size_t>(0, budget / 2)(rng);
    budget -= extra;
    const std::size_t raters = 1 + extra;
    std::vector<Rating> ratings;
    for (std::size_t r = 0; r < raters; ++r) ratings.emplace_back(unit(rng));
    sellers.emplace_back("s" + std::to_string(i), std::move(ratings));
  }
  const double k =
      std::uniform_real_distribution<double>(spec.min_profit, spec.max_profit)(rng);
  return Market(std::move(sellers), total, k, 1.0, spec.snowball_exponent);
}

}  // namespace bribery
