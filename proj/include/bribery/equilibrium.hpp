#pragma once

// Static-game solution concepts over the count model: payoff tensors,
// iterated elimination of strictly dominated strategies, pure Nash
// enumeration, best-response iteration, social optimum and the
// over-bribery gap between equilibrium and optimum.

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "bribery/core.hpp"

namespace bribery {

enum class Valuation {
  NetUtility,  // utility - cost
  Payoff,      // utility - initial utility - cost
};

struct EnumerationLimits {
  std::size_t max_cells = std::size_t{1} << 24;
};

/// Dense tensor over all count profiles within caps. Profiles bribing more
/// buyers than the pool holds are absent.
class PayoffMatrix {
 public:
  const Market& market() const { return market_; }
  const CountProfile& caps() const { return caps_; }
  Valuation valuation() const { return valuation_; }
  std::size_t players() const { return caps_.size(); }
  std::size_t cell_count() const { return present_.size(); }
  std::size_t feasible_count() const;

  std::size_t index_of(const CountProfile& profile) const;
  CountProfile profile_at(std::size_t index) const;
  bool within_caps(const CountProfile& profile) const;
  bool present(const CountProfile& profile) const;
  bool present_at(std::size_t index) const { return present_.at(index); }

  /// Per-seller values of a present cell; throws Infeasible if absent.
  std::span<const double> values(const CountProfile& profile) const;
  std::span<const double> values_at(std::size_t index) const;
  double value(const CountProfile& profile, std::size_t seller) const {
    return values(profile)[seller];
  }

  /// Initial (all-zero) utility of each seller; the Payoff offset.
  double baseline(std::size_t seller) const { return baseline_.at(seller); }

  /// Every present profile in index order.
  std::vector<CountProfile> feasible_profiles() const;

 private:
  friend PayoffMatrix build_matrix(const Market&, const CountProfile&,
                                   Valuation, const EnumerationLimits&);
  PayoffMatrix(Market market, CountProfile caps, Valuation valuation);

  Market market_;
  CountProfile caps_;
  Valuation valuation_;
  std::vector<std::size_t> strides_;
  std::vector<bool> present_;
  std::vector<double> values_;  // cell_count * players
  std::vector<double> baseline_;
};

PayoffMatrix build_matrix(const Market& market, const CountProfile& caps,
                          Valuation valuation = Valuation::NetUtility,
                          const EnumerationLimits& limits = {});

/// Caps of pool per seller: makes enumeration complete.
CountProfile default_caps(const Market& market);

/// Surviving profiles after removing strictly dominated counts until no
/// more can be removed. Sorted ascending.
std::vector<CountProfile> iterated_elimination(const PayoffMatrix& matrix);

/// Every present profile at which each seller's count is a best response.
std::vector<CountProfile> pure_nash(const PayoffMatrix& matrix);

/// Argmax set of `seller`'s own count against `opponents` (own entry
/// ignored), restricted to caps and feasibility. Ascending.
std::vector<std::size_t> best_response(const PayoffMatrix& matrix,
                                       std::size_t seller,
                                       const CountProfile& opponents);

/// Synchronous best-response iteration from the zero profile (lowest count
/// on ties); sellers with rater_count/pool >= k are pinned at 0. The fixpoint
/// is checked to be a pure Nash profile of the matrix.
/// Throws NonConvergence on a cycle, Infeasible when nothing is feasible.
CountProfile first_order_profile(const Market& market, const CountProfile& caps,
                                 const EnumerationLimits& limits = {});

/// The profile reported as "the" static solution: first_order_profile when
/// it converges, otherwise the pure Nash profile with the largest total
/// (ties lexicographically smallest). Throws NonConvergence if neither
/// exists.
CountProfile static_solution(const Market& market, const CountProfile& caps,
                             const EnumerationLimits& limits = {});

struct SocialOptimum {
  CountProfile profile;
  double welfare = 0.0;      // sum of payoffs
  double net_welfare = 0.0;  // sum of net utilities
};

/// Maximizes total payoff; ties by smallest total count, then lexicographic.
SocialOptimum social_optimum(const PayoffMatrix& matrix);

struct EquilibriumReport {
  std::vector<CountProfile> pure_nash;
  std::vector<CountProfile> iesds_survivors;
  SocialOptimum social_optimum;
  std::optional<CountProfile> selected_nash;  // maximal total
  std::size_t nash_total = 0;
  std::size_t optimum_total = 0;
  long long gap = 0;
  bool nash_found = false;
  /// nash_total >= optimum_total (vacuous when no Nash profile exists).
  bool overbribery_holds = true;
};

EquilibriumReport overbribery_gap(const PayoffMatrix& matrix);

/// One row per present profile: count_<id>..., value_<id>...
void write_matrix_csv(std::ostream& os, const PayoffMatrix& matrix);

/// Net utility of `seller` over own count x opponents' total count.
/// Utility depends on the opponents only through their total.
struct PayoffSurface {
  std::size_t seller = 0;
  std::size_t own_cap = 0;
  std::size_t others_cap = 0;
  std::vector<std::optional<double>> cells;  // row-major own x others
  std::optional<double> at(std::size_t own, std::size_t others) const {
    return cells.at(own * (others_cap + 1) + others);
  }
};

PayoffSurface payoff_surface(const Market& market, std::size_t seller,
                             const CountProfile& caps);

void write_surface_csv(std::ostream& os, const PayoffSurface& surface);

}  // namespace bribery
