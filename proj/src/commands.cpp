#include "bribery/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "bribery/calibration.hpp"
#include "bribery/fairness.hpp"
#include "bribery/greedy.hpp"

namespace bribery::cli {

using json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
  return os;
}

void write_json(const std::filesystem::path& dir, const std::string& name,
                const json& report) {
  auto os = open_out(dir, name);
  os << report.dump(2) << '\n';
}

json profile_json(const CountProfile& p) {
  return json(std::vector<std::size_t>(p.counts().begin(), p.counts().end()));
}

json profiles_json(const std::vector<CountProfile>& list) {
  json out = json::array();
  for (const auto& p : list) out.push_back(profile_json(p));
  return out;
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string target_name(const BuyerRef& ref) {
  if (ref.kind == BuyerRef::Kind::Fresh) return "fresh:" + std::to_string(ref.index);
  return "rater:" + std::to_string(ref.index);
}

json seller_ids(const Market& market) {
  json ids = json::array();
  for (const auto& s : market.sellers()) ids.push_back(s.id());
  return ids;
}

std::size_t resolve_seller(const Market& market, const std::string& ref) {
  for (std::size_t i = 0; i < market.size(); ++i) {
    if (market.seller(i).id() == ref) return i;
  }
  throw ScenarioError("--surface: unknown seller '" + ref + "'");
}

}  // namespace

Limits limits_from_env() {
  Limits limits;
  if (const char* raw = std::getenv(kMaxCellsEnv)) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || raw[used] != '\0' || v == 0) {
      throw ScenarioError(std::string(kMaxCellsEnv) + " must be a positive integer");
    }
    limits.matrix.max_cells = v;
    limits.tree.max_leaves = v;
  }
  return limits;
}

void cmd_matrix(const Scenario& scenario, const std::filesystem::path& out,
                const std::optional<std::string>& surface_seller,
                const Limits& limits) {
  const auto matrix = build_matrix(scenario.market, scenario.caps,
                                   Valuation::NetUtility, limits.matrix);
  {
    auto os = open_out(out, "matrix.csv");
    write_matrix_csv(os, matrix);
  }
  if (surface_seller) {
    const auto seller = resolve_seller(scenario.market, *surface_seller);
    const auto surface = payoff_surface(scenario.market, seller, scenario.caps);
    auto os = open_out(out, "surface_" + scenario.market.seller(seller).id() + ".csv");
    write_surface_csv(os, surface);
  }
}

json cmd_solve(const Scenario& scenario, const std::filesystem::path& out,
               const Limits& limits) {
  const auto& market = scenario.market;
  const auto matrix = build_matrix(market, scenario.caps, Valuation::NetUtility,
                                   limits.matrix);
  const auto report = overbribery_gap(matrix);

  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["command"] = "solve";
  j["sellers"] = seller_ids(market);
  j["caps"] = profile_json(scenario.caps);
  j["potential_buyers"] = market.potential_buyers();

  json regimes = json::array();
  for (std::size_t i = 0; i < market.size(); ++i) {
    if (market.potential_buyers() == 0) {
      regimes.push_back(false);
    } else {
      regimes.push_back(is_profitable_regime(market, i));
    }
  }
  j["profitable_regime"] = regimes;

  std::string method = "first_order";
  std::optional<CountProfile> solution;
  if (market.potential_buyers() == 0) {
    solution = CountProfile::zeros(market.size());
    method = "empty_pool";
  } else {
    try {
      solution = first_order_profile(market, scenario.caps, limits.matrix);
    } catch (const NonConvergence&) {
      solution = report.selected_nash;
      method = "max_total_nash";
    }
  }
  if (!solution) {
    throw NonConvergence("no pure Nash profile within caps and best-response "
                         "iteration did not converge");
  }
  json sol;
  sol["profile"] = profile_json(*solution);
  sol["method"] = method;
  json net = json::array(), pay = json::array();
  for (std::size_t i = 0; i < market.size(); ++i) {
    net.push_back(matrix.value(*solution, i));
    pay.push_back(matrix.value(*solution, i) - matrix.baseline(i));
  }
  sol["net_utility"] = net;
  sol["payoff"] = pay;
  j["solution"] = sol;

  j["pure_nash"] = profiles_json(report.pure_nash);
  j["iesds_survivors"] = profiles_json(report.iesds_survivors);
  j["social_optimum"] = {{"profile", profile_json(report.social_optimum.profile)},
                         {"welfare", report.social_optimum.welfare},
                         {"net_welfare", report.social_optimum.net_welfare}};
  j["selected_nash"] =
      report.selected_nash ? profile_json(*report.selected_nash) : json(nullptr);
  j["nash_total"] = report.nash_total;
  j["optimum_total"] = report.optimum_total;
  j["gap"] = report.gap;
  j["nash_found"] = report.nash_found;
  j["overbribery_holds"] = report.overbribery_holds;

  if (scenario.budget) {
    json greedy = json::array();
    const auto zeros = CountProfile::zeros(market.size());
    for (std::size_t i = 0; i < market.size(); ++i) {
      const auto strategy = greedy_strategy(market.seller(i), market.potential_buyers(),
                                            Budget(*scenario.budget));
      json efforts = json::array();
      for (const auto& [ref, effort] : strategy.efforts()) {
        efforts.push_back({{"target", target_name(ref)}, {"effort", effort}});
      }
      greedy.push_back({{"seller", market.seller(i).id()},
                        {"budget", *scenario.budget},
                        {"cost", strategy_cost(strategy)},
                        {"payoff", effort_payoff(market, i, strategy, zeros)},
                        {"efforts", efforts}});
    }
    j["greedy"] = greedy;
  }

  write_json(out, "solve.json", j);

  auto os = open_out(out, "solve.txt");
  os << "sellers            ";
  for (const auto& s : market.sellers()) os << ' ' << s.id();
  os << "\npotential buyers    " << market.potential_buyers() << '\n';
  os << "caps                " << to_string(scenario.caps) << '\n';
  os << "solution (" << method << ")  " << to_string(*solution) << "  values";
  for (std::size_t i = 0; i < market.size(); ++i) {
    os << ' ' << fixed(matrix.value(*solution, i));
  }
  os << "\npure nash          ";
  for (const auto& p : report.pure_nash) os << ' ' << to_string(p);
  os << "\niesds survivors    ";
  for (const auto& p : report.iesds_survivors) os << ' ' << to_string(p);
  os << "\nsocial optimum      " << to_string(report.social_optimum.profile)
     << "  welfare " << fixed(report.social_optimum.welfare, 4) << "  net "
     << fixed(report.social_optimum.net_welfare, 4) << '\n';
  os << "O* / O** / gap      " << report.nash_total << " / " << report.optimum_total
     << " / " << report.gap << '\n';
  return j;
}

Trace cmd_simulate(const Scenario& scenario, const std::filesystem::path& out,
                   const Limits& limits) {
  std::size_t leaves = 1;
  for (std::size_t i = 0; i < scenario.caps.size(); ++i) {
    const std::size_t width = scenario.caps[i] + 1;
    if (leaves > limits.tree.max_leaves / width) {
      throw SizeBoundExceeded("simulation game tree", leaves * width,
                              limits.tree.max_leaves);
    }
    leaves *= width;
  }
  const auto trace = simulate(scenario.game(), scenario.arrivals(), scenario.slots,
                              scenario.policy_rule);
  auto os = open_out(out, "trace.csv");
  write_trace_csv(os, trace);
  return trace;
}

json cmd_fairness(const Scenario& scenario, const std::filesystem::path& out) {
  const auto& market = scenario.market;
  const auto& params = scenario.fairness;
  if (market.size() == 0) throw ScenarioError("fairness: market has no sellers");
  const std::size_t seller = params.seller;

  const auto minimum =
      min_fair_raters_for_proofness(market, seller, params.fair_mean, params.cap);
  const auto roots = critical_point_paper(market, seller, params.fair_mean);

  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["command"] = "fairness";
  j["seller"] = market.seller(seller).id();
  j["fair_mean"] = params.fair_mean;
  j["cap"] = params.cap;
  j["potential_buyers"] = market.potential_buyers();
  j["initial_utility"] = initial_utility(market, seller);
  j["max_bribery_payoff"] = market.potential_buyers() == 0
                                ? 0.0
                                : max_bribery_payoff(market, seller);
  j["bribery_proof_now"] = is_bribery_proof(market, seller);
  j["min_fair_raters"] = minimum ? json(*minimum) : json(nullptr);
  if (minimum) {
    j["utility_with_fair_at_min"] =
        utility_with_fair(market, seller, FairCohort(*minimum, params.fair_mean));
  }
  j["cohort_reading"] =
      "numerator = existing rating mass + cohort rating mass; "
      "denominator = raters + cohort size";
  j["critical_point_paper"] = {{"as_printed", roots.as_printed},
                               {"discriminant", roots.discriminant},
                               {"roots", roots.roots},
                               {"double_root", roots.double_root}};
  write_json(out, "fairness.json", j);

  auto os = open_out(out, "fairness.txt");
  os << "seller               " << market.seller(seller).id() << '\n';
  os << "fair mean            " << fixed(params.fair_mean, 4) << '\n';
  os << "cohort cap           " << params.cap << '\n';
  os << "min fair raters      " << (minimum ? std::to_string(*minimum) : "not found")
     << '\n';
  os << "quadratic disc.      " << fixed(roots.discriminant, 4) << '\n';
  os << "quadratic roots     ";
  if (roots.roots.empty()) os << " none";
  for (double r : roots.roots) os << ' ' << fixed(r, 4);
  os << '\n';
  return j;
}

json cmd_calibrate(const std::filesystem::path& csv_in,
                   const std::filesystem::path& out) {
  std::ifstream in(csv_in);
  if (!in) throw ScenarioError("cannot open '" + csv_in.string() + "'");
  const auto fit = fit_snowball(read_observations(in));
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["command"] = "calibrate";
  j["a"] = fit.a;
  j["n"] = fit.n;
  j["b"] = fit.b;
  j["omega1"] = fit.omega1;
  j["omega2"] = fit.omega2;
  j["power_residual"] = fit.power_residual;
  j["loglog_residual"] = fit.loglog_residual;
  j["power_rows"] = fit.power_rows;
  j["loglog_rows"] = fit.loglog_rows;
  j["dropped_power_rows"] = fit.dropped_power_rows;
  j["dropped_loglog_rows"] = fit.dropped_loglog_rows;
  write_json(out, "calibration.json", j);

  auto os = open_out(out, "calibration.txt");
  os << "reviews  = " << fixed(fit.a, 6) << " * r^" << fixed(fit.n, 6)
     << "   (rms log residual " << fixed(fit.power_residual, 6) << ", "
     << fit.power_rows << " rows)\n";
  os << "installs = reviews^" << fixed(fit.b, 6) << "   (rms log residual "
     << fixed(fit.loglog_residual, 6) << ", " << fit.loglog_rows << " rows)\n";
  os << "installs = " << fixed(fit.omega1, 6) << " * r^" << fixed(fit.omega2, 6)
     << '\n';
  return j;
}

int exit_code_of(const std::exception& e) {
  if (dynamic_cast<const SizeBoundExceeded*>(&e)) return kSizeBound;
  if (dynamic_cast<const NonConvergence*>(&e)) return kNonConvergence;
  if (dynamic_cast<const BriberyError*>(&e)) return kValidation;
  return kFailure;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Bribery games in rating systems: solver and simulator", "bribery"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::string caps_text;
  std::string surface;
  std::string csv_in;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", scenario_path,
                    "Scenario YAML file (or `example1` for the bundled duopoly)")
        ->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--caps", caps_text, "Per-seller caps, e.g. 3,3");
  };

  auto* matrix = app.add_subcommand("matrix", "Tabulate the payoff tensor as CSV");
  add_common(matrix);
  matrix->add_option("--surface", surface, "Also emit a payoff surface for this seller");
  auto* solve = app.add_subcommand("solve", "Nash, IESDS, social optimum, gap");
  add_common(solve);
  auto* sim = app.add_subcommand("simulate", "Run the dynamic game per time slot");
  add_common(sim);
  auto* fair = app.add_subcommand("fairness", "Fair-rater bribery-proofness threshold");
  add_common(fair);
  auto* cal = app.add_subcommand("calibrate", "Fit the snowball model from CSV");
  cal->add_option("--input", csv_in, "CSV with header rating,reviews,installs")->required();
  cal->add_option("--out", out_dir, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    const auto limits = limits_from_env();
    if (cal->parsed()) {
      cmd_calibrate(csv_in, out_dir);
      return kOk;
    }
    std::optional<CountProfile> caps;
    if (!caps_text.empty()) caps = parse_caps(caps_text);
    const auto scenario = load_scenario(scenario_path, seed, caps);
    if (matrix->parsed()) {
      cmd_matrix(scenario, out_dir,
                 surface.empty() ? std::nullopt : std::optional<std::string>(surface),
                 limits);
    } else if (solve->parsed()) {
      cmd_solve(scenario, out_dir, limits);
    } else if (sim->parsed()) {
      cmd_simulate(scenario, out_dir, limits);
    } else if (fair->parsed()) {
      cmd_fairness(scenario, out_dir);
    }
    return kOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_of(e);
  }
}

}  // namespace bribery::cli
