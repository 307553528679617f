#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bribery/calibration.hpp"
#include "bribery/core.hpp"
#include "bribery/dynamic.hpp"
#include "bribery/equilibrium.hpp"
#include "bribery/fairness.hpp"
#include "bribery/greedy.hpp"

namespace py = pybind11;
using namespace bribery;

namespace {

CountProfile to_profile(const std::vector<std::size_t>& counts) {
  return CountProfile(counts);
}

std::vector<std::size_t> from_profile(const CountProfile& p) {
  return {p.counts().begin(), p.counts().end()};
}

std::vector<std::vector<std::size_t>> from_profiles(const std::vector<CountProfile>& list) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& p : list) out.push_back(from_profile(p));
  return out;
}

py::dict strategy_dict(const EffortStrategy& strategy) {
  py::dict out;
  for (const auto& [ref, effort] : strategy.efforts()) {
    const char* kind = ref.kind == BuyerRef::Kind::Fresh ? "fresh" : "rater";
    out[py::make_tuple(kind, ref.index)] = effort;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bribery games in rating systems";

  auto base = py::register_exception<BriberyError>(m, "BriberyError", PyExc_RuntimeError);
  const auto invalid_bases = py::make_tuple(base, py::handle(PyExc_ValueError));
  py::register_exception<InvalidInput>(m, "InvalidInput", invalid_bases);
  py::register_exception<UndefinedMean>(m, "UndefinedMean", base.ptr());
  py::register_exception<NoPotentialBuyers>(m, "NoPotentialBuyers", base.ptr());
  py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
  py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
  py::register_exception<SizeBoundExceeded>(m, "SizeBoundExceeded", base.ptr());

  py::class_<SellerState>(m, "SellerState")
      .def(py::init([](std::string id, std::vector<double> ratings,
                       std::optional<std::size_t> rater_count) {
             auto r = to_ratings(ratings);
             const std::size_t n = rater_count.value_or(r.size());
             return SellerState(std::move(id), std::move(r), n);
           }),
           py::arg("id"), py::arg("ratings"), py::arg("rater_count") = py::none())
      .def_static("uniform", &SellerState::uniform, py::arg("id"), py::arg("count"),
                  py::arg("mean"))
      .def_property_readonly("id", &SellerState::id)
      .def_property_readonly("ratings",
                             [](const SellerState& s) {
                               std::vector<double> out;
                               for (const auto& r : s.ratings()) out.push_back(r.value());
                               return out;
                             })
      .def_property_readonly("rater_count", &SellerState::rater_count)
      .def("__repr__", [](const SellerState& s) {
        return "<SellerState '" + s.id() + "' raters=" + std::to_string(s.rater_count()) + ">";
      });

  py::class_<Market>(m, "Market")
      .def(py::init<std::vector<SellerState>, std::size_t, double, double, double>(),
           py::arg("sellers"), py::arg("total_buyers"), py::arg("profit_per_purchase"),
           py::arg("snowball_scale") = 1.0, py::arg("snowball_exponent") = 1.0)
      .def_property_readonly("size", &Market::size)
      .def_property_readonly("total_buyers", &Market::total_buyers)
      .def_property_readonly("potential_buyers", &Market::potential_buyers)
      .def_property_readonly("profit_per_purchase", &Market::profit_per_purchase)
      .def("seller", &Market::seller, py::arg("index"))
      .def("index_of", &Market::index_of, py::arg("id"));

  m.def("mean_rating", &mean_rating, py::arg("seller"));
  m.def("utility",
        [](const Market& mk, std::size_t i, const std::vector<std::size_t>& p) {
          return utility(mk, i, to_profile(p));
        },
        py::arg("market"), py::arg("seller"), py::arg("profile"));
  m.def("net_utility",
        [](const Market& mk, std::size_t i, const std::vector<std::size_t>& p) {
          return net_utility(mk, i, to_profile(p));
        },
        py::arg("market"), py::arg("seller"), py::arg("profile"));
  m.def("payoff",
        [](const Market& mk, std::size_t i, const std::vector<std::size_t>& p) {
          return payoff(mk, i, to_profile(p));
        },
        py::arg("market"), py::arg("seller"), py::arg("profile"));

  m.def("greedy_strategy",
        [](const SellerState& s, std::size_t fresh_pool, double budget) {
          return strategy_dict(greedy_strategy(s, fresh_pool, Budget(budget)));
        },
        py::arg("seller"), py::arg("fresh_pool"), py::arg("budget"),
        "Greedy bribes keyed by ('rater', index) or ('fresh', ordinal).");
  m.def("is_profitable_regime", &is_profitable_regime, py::arg("market"),
        py::arg("seller"));

  py::class_<PayoffMatrix>(m, "PayoffMatrix")
      .def_property_readonly("caps", [](const PayoffMatrix& x) { return from_profile(x.caps()); })
      .def_property_readonly("cell_count", &PayoffMatrix::cell_count)
      .def("present",
           [](const PayoffMatrix& x, const std::vector<std::size_t>& p) {
             return x.present(to_profile(p));
           })
      .def("values",
           [](const PayoffMatrix& x, const std::vector<std::size_t>& p) {
             const auto v = x.values(to_profile(p));
             return std::vector<double>(v.begin(), v.end());
           })
      .def("feasible_profiles",
           [](const PayoffMatrix& x) { return from_profiles(x.feasible_profiles()); });

  m.def("build_matrix",
        [](const Market& mk, std::optional<std::vector<std::size_t>> caps, bool payoff_values) {
          const auto c = caps ? to_profile(*caps) : default_caps(mk);
          return build_matrix(mk, c, payoff_values ? Valuation::Payoff : Valuation::NetUtility);
        },
        py::arg("market"), py::arg("caps") = py::none(), py::arg("payoff") = false);
  m.def("pure_nash", [](const PayoffMatrix& x) { return from_profiles(pure_nash(x)); });
  m.def("iterated_elimination",
        [](const PayoffMatrix& x) { return from_profiles(iterated_elimination(x)); });
  m.def("best_response",
        [](const PayoffMatrix& x, std::size_t i, const std::vector<std::size_t>& opp) {
          return best_response(x, i, to_profile(opp));
        },
        py::arg("matrix"), py::arg("seller"), py::arg("opponents"));
  m.def("social_optimum", [](const PayoffMatrix& x) {
    const auto so = social_optimum(x);
    return py::make_tuple(from_profile(so.profile), so.welfare, so.net_welfare);
  });
  m.def("overbribery_gap", [](const PayoffMatrix& x) {
    const auto r = overbribery_gap(x);
    py::dict d;
    d["pure_nash"] = from_profiles(r.pure_nash);
    d["iesds_survivors"] = from_profiles(r.iesds_survivors);
    d["social_optimum"] = from_profile(r.social_optimum.profile);
    d["welfare"] = r.social_optimum.welfare;
    d["nash_total"] = r.nash_total;
    d["optimum_total"] = r.optimum_total;
    d["gap"] = r.gap;
    d["nash_found"] = r.nash_found;
    return d;
  });
  m.def("first_order_profile",
        [](const Market& mk, std::optional<std::vector<std::size_t>> caps) {
          return from_profile(
              first_order_profile(mk, caps ? to_profile(*caps) : default_caps(mk)));
        },
        py::arg("market"), py::arg("caps") = py::none());

  m.def("sample_arrivals",
        [](std::vector<double> rates, std::uint64_t seed, std::size_t slots) {
          return sample_arrivals(ArrivalProcess(std::move(rates), seed), slots);
        },
        py::arg("rates"), py::arg("seed"), py::arg("slots"));
  m.def("solve_sequential",
        [](const Market& mk, std::vector<std::size_t> order,
           const std::vector<std::size_t>& caps,
           std::optional<std::vector<std::pair<std::vector<std::int64_t>, std::vector<double>>>>
               beliefs) {
          std::vector<BeliefModel> b;
          if (beliefs) {
            for (auto& [support, weights] : *beliefs) b.emplace_back(support, weights);
          } else {
            b.assign(mk.size(), BeliefModel::truth());
          }
          SequentialGame game{mk, std::move(order), to_profile(caps), std::move(b), {}};
          const auto plan = solve_sequential(game);
          py::dict d;
          d["path"] = plan.path;
          d["profile"] = from_profile(plan.path_profile);
          d["payoffs"] = plan.path_payoffs;
          return d;
        },
        py::arg("market"), py::arg("order"), py::arg("caps"),
        py::arg("beliefs") = py::none());

  m.def("utility_with_fair",
        [](const Market& mk, std::size_t i, std::size_t count, double mean) {
          return utility_with_fair(mk, i, FairCohort(count, mean));
        },
        py::arg("market"), py::arg("seller"), py::arg("count"), py::arg("mean"));
  m.def("min_fair_raters_for_proofness", &min_fair_raters_for_proofness,
        py::arg("market"), py::arg("seller"), py::arg("fair_mean"), py::arg("cap"));
  m.def("critical_point_paper",
        [](const Market& mk, std::size_t i, double fair_mean) {
          const auto r = critical_point_paper(mk, i, fair_mean);
          py::dict d;
          d["discriminant"] = r.discriminant;
          d["roots"] = r.roots;
          d["double_root"] = r.double_root;
          d["as_printed"] = r.as_printed;
          return d;
        },
        py::arg("market"), py::arg("seller"), py::arg("fair_mean"));

  m.def("fit_power_law", [](const std::vector<std::pair<double, double>>& pairs) {
    const auto f = fit_power_law(pairs);
    return py::make_tuple(f.a, f.n, f.residual);
  });
  m.def("fit_loglog", [](const std::vector<std::pair<double, double>>& pairs) {
    const auto f = fit_loglog(pairs);
    return py::make_tuple(f.b, f.residual);
  });
  m.def("compose_snowball", [](double a, double n, double b) {
    PowerLawFit p;
    p.a = a;
    p.n = n;
    LogLogFit l;
    l.b = b;
    const auto f = compose_snowball(p, l);
    return py::make_tuple(f.omega1, f.omega2);
  });
}
