#include "bribery/equilibrium.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>

#include "bribery/greedy.hpp"

namespace bribery {

namespace {

/// Calls fn(profile) for every combination drawn from `sets`, with entry
/// `skip` left at `fixed`. Last seller varies fastest.
void for_each_combo(const std::vector<std::vector<std::size_t>>& sets,
                    std::size_t skip, std::size_t fixed,
                    const std::function<void(const CountProfile&)>& fn) {
  const std::size_t m = sets.size();
  for (std::size_t j = 0; j < m; ++j) {
    if (j != skip && sets[j].empty()) return;
  }
  std::vector<std::size_t> pos(m, 0);
  CountProfile profile = CountProfile::zeros(m);
  while (true) {
    for (std::size_t j = 0; j < m; ++j) {
      profile[j] = j == skip ? fixed : sets[j][pos[j]];
    }
    fn(profile);
    std::size_t j = m;
    while (j-- > 0) {
      if (j == skip) continue;
      if (++pos[j] < sets[j].size()) break;
      pos[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

std::vector<std::vector<std::size_t>> full_sets(const CountProfile& caps) {
  std::vector<std::vector<std::size_t>> sets(caps.size());
  for (std::size_t j = 0; j < caps.size(); ++j) {
    for (std::size_t c = 0; c <= caps[j]; ++c) sets[j].push_back(c);
  }
  return sets;
}

bool is_best_response(const PayoffMatrix& matrix, const CountProfile& profile,
                      std::size_t seller) {
  const double own = matrix.value(profile, seller);
  for (std::size_t c = 0; c <= matrix.caps()[seller]; ++c) {
    const auto alt = profile.with(seller, c);
    if (matrix.present(alt) &&
        matrix.value(alt, seller) > own + kPayoffTolerance) {
      return false;
    }
  }
  return true;
}

bool is_nash(const PayoffMatrix& matrix, const CountProfile& profile) {
  for (std::size_t i = 0; i < matrix.players(); ++i) {
    if (!is_best_response(matrix, profile, i)) return false;
  }
  return true;
}

}  // namespace

PayoffMatrix::PayoffMatrix(Market market, CountProfile caps, Valuation valuation)
    : market_(std::move(market)), caps_(std::move(caps)), valuation_(valuation) {}

std::size_t PayoffMatrix::feasible_count() const {
  return static_cast<std::size_t>(
      std::count(present_.begin(), present_.end(), true));
}

bool PayoffMatrix::within_caps(const CountProfile& profile) const {
  if (profile.size() != caps_.size()) return false;
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    if (profile[j] > caps_[j]) return false;
  }
  return true;
}

std::size_t PayoffMatrix::index_of(const CountProfile& profile) const {
  if (!within_caps(profile)) {
    throw InvalidInput("profile " + to_string(profile) + " outside caps " +
                       to_string(caps_));
  }
  std::size_t index = 0;
  for (std::size_t j = 0; j < caps_.size(); ++j) index += profile[j] * strides_[j];
  return index;
}

CountProfile PayoffMatrix::profile_at(std::size_t index) const {
  CountProfile profile = CountProfile::zeros(caps_.size());
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    profile[j] = index / strides_[j];
    index %= strides_[j];
  }
  return profile;
}

bool PayoffMatrix::present(const CountProfile& profile) const {
  return within_caps(profile) && present_[index_of(profile)];
}

std::span<const double> PayoffMatrix::values_at(std::size_t index) const {
  if (!present_.at(index)) {
    throw Infeasible("profile " + to_string(profile_at(index)) +
                     " is not feasible in this market");
  }
  return std::span<const double>(values_).subspan(index * players(), players());
}

std::span<const double> PayoffMatrix::values(const CountProfile& profile) const {
  return values_at(index_of(profile));
}

std::vector<CountProfile> PayoffMatrix::feasible_profiles() const {
  std::vector<CountProfile> out;
  for (std::size_t idx = 0; idx < cell_count(); ++idx) {
    if (present_[idx]) out.push_back(profile_at(idx));
  }
  return out;
}

CountProfile default_caps(const Market& market) {
  return CountProfile(
      std::vector<std::size_t>(market.size(), market.potential_buyers()));
}

PayoffMatrix build_matrix(const Market& market, const CountProfile& caps,
                          Valuation valuation, const EnumerationLimits& limits) {
  if (caps.size() != market.size()) {
    throw InvalidInput("caps " + to_string(caps) + " do not match " +
                       std::to_string(market.size()) + " sellers");
  }
  if (!market.feasible(CountProfile::zeros(market.size()))) {
    throw Infeasible("market has a negative pool of potential buyers");
  }
  std::size_t cells = 1;
  for (std::size_t j = 0; j < caps.size(); ++j) {
    const std::size_t width = caps[j] + 1;
    if (width == 0 || cells > limits.max_cells / width) {
      throw SizeBoundExceeded("payoff matrix cells",
                              std::numeric_limits<std::size_t>::max(),
                              limits.max_cells);
    }
    cells *= width;
  }
  if (cells > limits.max_cells) {
    throw SizeBoundExceeded("payoff matrix cells", cells, limits.max_cells);
  }

  PayoffMatrix matrix(market, caps, valuation);
  const std::size_t m = caps.size();
  matrix.strides_.assign(m, 1);
  for (std::size_t j = m; j-- > 1;) {
    matrix.strides_[j - 1] = matrix.strides_[j] * (caps[j] + 1);
  }
  matrix.present_.assign(cells, false);
  matrix.values_.assign(cells * m, 0.0);
  matrix.baseline_.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    matrix.baseline_[i] = initial_utility(market, i);
  }

  // Cells are independent; each write touches only its own slice.
  for (std::size_t idx = 0; idx < cells; ++idx) {
    const CountProfile profile = matrix.profile_at(idx);
    if (!market.feasible(profile)) continue;
    matrix.present_[idx] = true;
    for (std::size_t i = 0; i < m; ++i) {
      double v = net_utility(market, i, profile);
      if (valuation == Valuation::Payoff) v -= matrix.baseline_[i];
      matrix.values_[idx * m + i] = v;
    }
  }
  return matrix;
}

std::vector<CountProfile> iterated_elimination(const PayoffMatrix& matrix) {
  auto sets = full_sets(matrix.caps());
  const std::size_t m = matrix.players();

  bool changed = true;
  while (changed) {
    changed = false;
    // Simultaneous removal of every currently dominated count.
    std::vector<std::vector<std::size_t>> next = sets;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> kept;
      for (std::size_t a : sets[i]) {
        bool dominated = false;
        for (std::size_t b : sets[i]) {
          if (b == a) continue;
          bool any = false;
          bool strict = true;
          for_each_combo(sets, i, a, [&](const CountProfile& pa) {
            if (!strict) return;
            const auto pb = pa.with(i, b);
            if (!matrix.present(pa) || !matrix.present(pb)) return;
            any = true;
            if (!(matrix.value(pb, i) > matrix.value(pa, i) + kPayoffTolerance)) {
              strict = false;
            }
          });
          if (any && strict) {
            dominated = true;
            break;
          }
        }
        if (!dominated) kept.push_back(a);
      }
      if (kept.size() != sets[i].size()) changed = true;
      next[i] = std::move(kept);
    }
    sets = std::move(next);
  }

  std::vector<CountProfile> survivors;
  if (m == 0) return survivors;
  for_each_combo(sets, m, 0, [&](const CountProfile& p) {
    if (matrix.present(p)) survivors.push_back(p);
  });
  std::sort(survivors.begin(), survivors.end());
  return survivors;
}

std::vector<CountProfile> pure_nash(const PayoffMatrix& matrix) {
  std::vector<CountProfile> out;
  for (std::size_t idx = 0; idx < matrix.cell_count(); ++idx) {
    if (!matrix.present_at(idx)) continue;
    const auto profile = matrix.profile_at(idx);
    if (is_nash(matrix, profile)) out.push_back(profile);
  }
  return out;
}

std::vector<std::size_t> best_response(const PayoffMatrix& matrix,
                                       std::size_t seller,
                                       const CountProfile& opponents) {
  if (opponents.size() != matrix.players() || seller >= matrix.players()) {
    throw InvalidInput("opponent profile does not match the matrix");
  }
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::pair<std::size_t, double>> candidates;
  for (std::size_t c = 0; c <= matrix.caps()[seller]; ++c) {
    const auto p = opponents.with(seller, c);
    if (!matrix.present(p)) continue;
    const double v = matrix.value(p, seller);
    candidates.emplace_back(c, v);
    best = std::max(best, v);
  }
  std::vector<std::size_t> out;
  for (const auto& [c, v] : candidates) {
    if (v >= best - kPayoffTolerance) out.push_back(c);
  }
  return out;
}

CountProfile first_order_profile(const Market& market, const CountProfile& caps,
                                 const EnumerationLimits& limits) {
  if (market.potential_buyers() == 0) {
    throw NoPotentialBuyers("first-order profile needs a non-empty pool");
  }
  const auto matrix = build_matrix(market, caps, Valuation::NetUtility, limits);
  if (matrix.feasible_count() == 0) {
    throw Infeasible("no profile satisfies the constraints");
  }
  const std::size_t m = market.size();
  std::vector<bool> pinned(m);
  for (std::size_t i = 0; i < m; ++i) pinned[i] = !is_profitable_regime(market, i);

  CountProfile current = CountProfile::zeros(m);
  std::set<CountProfile> seen{current};
  const std::size_t max_steps = matrix.feasible_count() + 1;
  for (std::size_t step = 0; step < max_steps; ++step) {
    CountProfile next = current;
    for (std::size_t i = 0; i < m; ++i) {
      if (pinned[i]) {
        next[i] = 0;
        continue;
      }
      const auto br = best_response(matrix, i, current);
      if (br.empty()) {
        throw NonConvergence("best-response iteration left the feasible region at " +
                             to_string(current));
      }
      next[i] = br.front();
    }
    if (next == current) {
      if (!is_nash(matrix, current)) {
        throw NonConvergence("fixpoint " + to_string(current) +
                             " is not a pure Nash profile");
      }
      return current;
    }
    if (!matrix.present(next)) {
      throw NonConvergence("best-response iteration left the feasible region at " +
                           to_string(next));
    }
    if (!seen.insert(next).second) {
      throw NonConvergence("best-response iteration cycles through " +
                           to_string(next));
    }
    current = next;
  }
  throw NonConvergence("best-response iteration exceeded " +
                       std::to_string(max_steps) + " steps");
}

CountProfile static_solution(const Market& market, const CountProfile& caps,
                             const EnumerationLimits& limits) {
  if (market.potential_buyers() == 0) return CountProfile::zeros(market.size());
  try {
    return first_order_profile(market, caps, limits);
  } catch (const NonConvergence&) {
    const auto matrix = build_matrix(market, caps, Valuation::NetUtility, limits);
    const auto report = overbribery_gap(matrix);
    if (!report.selected_nash) throw;
    return *report.selected_nash;
  }
}

SocialOptimum social_optimum(const PayoffMatrix& matrix) {
  const std::size_t m = matrix.players();
  double offset = 0.0;  // sum of baselines
  for (std::size_t i = 0; i < m; ++i) offset += matrix.baseline(i);
  const double to_payoff = matrix.valuation() == Valuation::NetUtility ? offset : 0.0;

  std::optional<SocialOptimum> best;
  for (std::size_t idx = 0; idx < matrix.cell_count(); ++idx) {
    if (!matrix.present_at(idx)) continue;
    const auto values = matrix.values_at(idx);
    double sum = 0.0;
    for (double v : values) sum += v;
    const double welfare = sum - to_payoff;
    const auto profile = matrix.profile_at(idx);
    // Index order is lexicographic, so earlier wins among equal totals.
    const bool better =
        !best || welfare > best->welfare + kPayoffTolerance ||
        (welfare >= best->welfare - kPayoffTolerance &&
         profile.total() < best->profile.total());
    if (better) best = SocialOptimum{profile, welfare, welfare + offset};
  }
  if (!best) throw Infeasible("payoff matrix has no feasible cell");
  return *best;
}

EquilibriumReport overbribery_gap(const PayoffMatrix& matrix) {
  EquilibriumReport report;
  report.pure_nash = pure_nash(matrix);
  report.iesds_survivors = iterated_elimination(matrix);
  report.social_optimum = social_optimum(matrix);
  report.optimum_total = report.social_optimum.profile.total();
  report.nash_found = !report.pure_nash.empty();
  for (const auto& p : report.pure_nash) {
    if (!report.selected_nash || p.total() > report.selected_nash->total()) {
      report.selected_nash = p;
    }
  }
  if (report.selected_nash) {
    report.nash_total = report.selected_nash->total();
    report.gap = static_cast<long long>(report.nash_total) -
                 static_cast<long long>(report.optimum_total);
    report.overbribery_holds = report.gap >= 0;
  }
  return report;
}

void write_matrix_csv(std::ostream& os, const PayoffMatrix& matrix) {
  const auto& market = matrix.market();
  const std::size_t m = matrix.players();
  for (std::size_t i = 0; i < m; ++i) {
    os << (i ? "," : "") << "count_" << market.seller(i).id();
  }
  for (std::size_t i = 0; i < m; ++i) {
    os << ",value_" << market.seller(i).id();
  }
  os << '\n';
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(12);
  for (std::size_t idx = 0; idx < matrix.cell_count(); ++idx) {
    if (!matrix.present_at(idx)) continue;
    const auto profile = matrix.profile_at(idx);
    const auto values = matrix.values_at(idx);
    for (std::size_t i = 0; i < m; ++i) os << (i ? "," : "") << profile[i];
    for (std::size_t i = 0; i < m; ++i) os << ',' << values[i];
    os << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

PayoffSurface payoff_surface(const Market& market, std::size_t seller,
                             const CountProfile& caps) {
  if (caps.size() != market.size() || seller >= market.size()) {
    throw InvalidInput("surface caps do not match the market");
  }
  PayoffSurface surface;
  surface.seller = seller;
  surface.own_cap = caps[seller];
  surface.others_cap = caps.total_except(seller);
  const std::size_t pool = market.potential_buyers();
  // Any opponent seller can carry the whole opponents' total.
  const std::size_t carrier = seller == 0 ? 1 : 0;
  for (std::size_t own = 0; own <= surface.own_cap; ++own) {
    for (std::size_t others = 0; others <= surface.others_cap; ++others) {
      if (own + others > pool) {
        surface.cells.emplace_back(std::nullopt);
        continue;
      }
      CountProfile profile = CountProfile::zeros(market.size());
      profile[seller] = own;
      if (others > 0) profile[carrier] = others;
      surface.cells.emplace_back(net_utility(market, seller, profile));
    }
  }
  return surface;
}

void write_surface_csv(std::ostream& os, const PayoffSurface& surface) {
  os << "own\\others";
  for (std::size_t o = 0; o <= surface.others_cap; ++o) os << ',' << o;
  os << '\n';
  const auto precision = os.precision();
  os << std::setprecision(12);
  for (std::size_t own = 0; own <= surface.own_cap; ++own) {
    os << own;
    for (std::size_t o = 0; o <= surface.others_cap; ++o) {
      os << ',';
      if (const auto v = surface.at(own, o)) os << *v;
    }
    os << '\n';
  }
  os.precision(precision);
}

}  // namespace bribery
