#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bribery/commands.hpp"
#include "bribery/fairness.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace bribery;
using bribery::cli::run;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_out") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

int invoke(std::initializer_list<std::string> args) { return run(std::vector<std::string>(args)); }

const char* kRandomScenario = R"(schema_version: 1
market:
  random: {sellers: [2, 3], total_buyers: [8, 20], profit: [0.5, 4]}
seed: 17
slots: 4
arrivals: {rates: [2]}
)";

}  // namespace

TEST_CASE("the bundled scenario encodes the duopoly") {
  const auto s = load_scenario("example1");
  REQUIRE(s.market.size() == 2);
  CHECK(s.market.seller(0).id() == "i");
  CHECK(s.market.seller(0).rater_count() == 5);
  CHECK(mean_rating(s.market.seller(0)) == doctest::Approx(0.2));
  CHECK(s.market.seller(1).rater_count() == 2);
  CHECK(mean_rating(s.market.seller(1)) == doctest::Approx(0.5));
  CHECK(s.market.total_buyers() == 20);
  CHECK(s.market.profit_per_purchase() == 2.0);
  CHECK(s.caps == CountProfile{3, 3});
}

TEST_CASE("matrix command") {
  const auto dir = fresh_dir("matrix");
  REQUIRE(invoke({"matrix", "--scenario", "example1", "--out", dir.string()}) == 0);
  const auto rows = lines_of(slurp(dir / "matrix.csv"));
  REQUIRE(rows.size() == 17);
  CHECK(rows[0] == "count_i,count_j,value_i,value_j");
  CHECK(rows[1] == "0,0,5.2,13");
  CHECK(rows[10].rfind("2,1,6.5714", 0) == 0);

  const auto single = fresh_dir("matrix_single");
  REQUIRE(invoke({"matrix", "--scenario", "example1", "--caps", "0,0", "--out",
               single.string()}) == 0);
  CHECK(lines_of(slurp(single / "matrix.csv")).size() == 2);
}

TEST_CASE("payoff surface spot checks") {
  const auto dir = fresh_dir("surface");
  REQUIRE(invoke({"matrix", "--scenario", "example1", "--caps", "10,10", "--surface", "i",
               "--out", dir.string()}) == 0);
  const auto rows = lines_of(slurp(dir / "surface_i.csv"));
  REQUIRE(rows.size() == 12);
  auto cell = [&](std::size_t own, std::size_t others) {
    std::istringstream in(rows[own + 1]);
    std::string field;
    for (std::size_t f = 0; f <= others + 1; ++f) std::getline(in, field, ',');
    return field;
  };
  auto direct = [](double own, double others) {
    return 2.0 * (13.0 - own - others) * (1.0 + own) / (5.0 + own) - own;
  };
  CHECK(std::stod(cell(0, 0)) == doctest::Approx(direct(0, 0)));
  CHECK(std::stod(cell(4, 2)) == doctest::Approx(direct(4, 2)));
  CHECK(std::stod(cell(10, 3)) == doctest::Approx(direct(10, 3)));
  CHECK(cell(10, 10).empty());
  CHECK(invoke({"matrix", "--scenario", "example1", "--surface", "q", "--out",
             dir.string()}) == 2);
}

TEST_CASE("solve command") {
  const auto dir = fresh_dir("solve");
  REQUIRE(invoke({"solve", "--scenario", "example1", "--out", dir.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "solve.json"));
  CHECK(j["pure_nash"] == nlohmann::json::parse("[[2,1]]"));
  CHECK(j["iesds_survivors"] == nlohmann::json::parse("[[2,1]]"));
  CHECK(j["solution"]["profile"] == nlohmann::json::parse("[2,1]"));
  CHECK(j["solution"]["net_utility"][0].get<double>() == doctest::Approx(6.5714).epsilon(1e-4));
  CHECK(j["solution"]["net_utility"][1].get<double>() == doctest::Approx(12.3333).epsilon(1e-4));
  CHECK(j["social_optimum"]["profile"] == nlohmann::json::parse("[1,1]"));
  CHECK(j["gap"] == 1);
  CHECK(fs::exists(dir / "solve.txt"));
}

TEST_CASE("solve with a single seller") {
  const auto dir = fresh_dir("solve_single");
  const auto path = write_file(dir, "one.yaml", R"(schema_version: 1
market:
  total_buyers: 12
  profit_per_purchase: 2
  sellers:
    - {id: solo, ratings: [0.4, 0.6]}
)");
  REQUIRE(invoke({"solve", "--scenario", path.string(), "--out", dir.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "solve.json"));
  REQUIRE(j["pure_nash"].size() == 1);
  CHECK(j["pure_nash"][0] == j["social_optimum"]["profile"]);
  CHECK(j["gap"] == 0);
}

TEST_CASE("randomized scenarios are reproducible") {
  const auto dir = fresh_dir("random");
  const auto path = write_file(dir, "random.yaml", kRandomScenario);
  for (const char* cmd : {"solve", "simulate", "matrix"}) {
    const auto a = fresh_dir(std::string("random_a_") + cmd);
    const auto b = fresh_dir(std::string("random_b_") + cmd);
    REQUIRE(invoke({cmd, "--scenario", path.string(), "--out", a.string()}) == 0);
    REQUIRE(invoke({cmd, "--scenario", path.string(), "--out", b.string()}) == 0);
    for (const auto& entry : fs::directory_iterator(a)) {
      CHECK(slurp(entry.path()) == slurp(b / entry.path().filename()));
    }
  }
  const auto s17 = load_scenario(path);
  const auto s18 = load_scenario(path, 18);
  CHECK(s17.seed == 17);
  CHECK(s18.seed == 18);
}

TEST_CASE("simulate command") {
  const auto solve_dir = fresh_dir("sim_solve");
  REQUIRE(invoke({"solve", "--scenario", "example1", "--out", solve_dir.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(solve_dir / "solve.json"));

  const auto dir = fresh_dir("sim");
  REQUIRE(invoke({"simulate", "--scenario", "example1", "--out", dir.string()}) == 0);
  const auto rows = lines_of(slurp(dir / "trace.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "slot,arrivals,count_i,count_j,utility_i,utility_j,potential_buyers");
  const std::string expected = "1,0," + std::to_string(j["solution"]["profile"][0].get<int>()) +
                               "," + std::to_string(j["solution"]["profile"][1].get<int>()) + ",";
  CHECK(rows[1].rfind(expected, 0) == 0);

  const auto zero = fresh_dir("sim_zero");
  const auto path = write_file(zero, "zero.yaml", R"(schema_version: 1
market:
  total_buyers: 20
  profit_per_purchase: 2
  sellers:
    - {id: i, rating_count: 5, mean_rating: 0.2}
    - {id: j, rating_count: 2, mean_rating: 0.5}
slots: 0
)");
  REQUIRE(invoke({"simulate", "--scenario", path.string(), "--out", zero.string()}) == 0);
  CHECK(lines_of(slurp(zero / "trace.csv")).size() == 1);
}

TEST_CASE("fairness command") {
  const auto dir = fresh_dir("fairness");
  REQUIRE(invoke({"fairness", "--scenario", "example1", "--out", dir.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "fairness.json"));
  CHECK(j["critical_point_paper"]["roots"].empty());
  CHECK(j["critical_point_paper"]["discriminant"].get<double>() < 0.0);
  const auto s = load_scenario("example1");
  const auto expected = min_fair_raters_for_proofness(s.market, 0, 0.2, 13);
  REQUIRE(expected.has_value());
  CHECK(j["min_fair_raters"] == *expected);
}

TEST_CASE("calibrate command") {
  const auto dir = fresh_dir("calibrate");
  std::ostringstream csv;
  csv << "rating,reviews,installs\n";
  for (int i = 1; i <= 10; ++i) {
    const double r = 0.1 * i;
    const double rev = 2.0 * r * r * r;
    csv << r << ',' << rev << ',' << rev * rev << '\n';
  }
  csv << "0.5,,\n";
  const auto path = write_file(dir, "obs.csv", csv.str());
  REQUIRE(invoke({"calibrate", "--input", path.string(), "--out", dir.string()}) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "calibration.json"));
  CHECK(j["omega1"].get<double>() == doctest::Approx(4.0));
  CHECK(j["omega2"].get<double>() == doctest::Approx(6.0));
  CHECK(j["dropped_power_rows"] == 1);

  const auto bad = write_file(dir, "bad.csv", "rating,reviews,installs\n0.5,abc,1\n");
  CHECK(invoke({"calibrate", "--input", bad.string(), "--out", dir.string()}) == 2);
}

TEST_CASE("validation errors name the field and line") {
  const auto dir = fresh_dir("invalid");
  const auto path = write_file(dir, "bad.yaml", R"(schema_version: 1
market:
  total_buyers: 20
  profit_per_purchase: 2
  sellers:
    - {id: i, ratings: [0.2, 1.4]}
)");
  try {
    load_scenario(path);
    FAIL("expected a validation error");
  } catch (const ScenarioError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 6") != std::string::npos);
    CHECK(what.find("market.sellers[0].ratings[1]") != std::string::npos);
  }
  CHECK(invoke({"solve", "--scenario", path.string(), "--out", dir.string()}) == 2);
  CHECK(invoke({"solve", "--scenario", (dir / "missing.yaml").string()}) == 2);
  CHECK(invoke({"solve", "--scenario", "example1", "--caps", "1,x"}) == 2);
  CHECK(invoke({"solve", "--scenario", "example1", "--caps", "1,2,3"}) == 2);
  CHECK(invoke({"frobnicate"}) == 2);
  CHECK(invoke({"solve"}) == 2);

  const auto version = write_file(dir, "version.yaml", "schema_version: 9\nmarket: {}\n");
  CHECK(invoke({"solve", "--scenario", version.string(), "--out", dir.string()}) == 2);
}

TEST_CASE("size bound from the environment") {
  const auto dir = fresh_dir("bound");
  setenv(cli::kMaxCellsEnv, "10", 1);
  CHECK(invoke({"matrix", "--scenario", "example1", "--out", dir.string()}) == 4);
  CHECK(invoke({"simulate", "--scenario", "example1", "--out", dir.string()}) == 4);
  setenv(cli::kMaxCellsEnv, "zero", 1);
  CHECK(invoke({"matrix", "--scenario", "example1", "--out", dir.string()}) == 2);
  unsetenv(cli::kMaxCellsEnv);
  CHECK(invoke({"matrix", "--scenario", "example1", "--out", dir.string()}) == 0);
}

TEST_CASE("exit codes by error kind") {
  CHECK(cli::exit_code_of(NonConvergence("cycle")) == 3);
  CHECK(cli::exit_code_of(SizeBoundExceeded("cells", 10, 5)) == 4);
  CHECK(cli::exit_code_of(InvalidInput("bad")) == 2);
  CHECK(cli::exit_code_of(Infeasible("none")) == 2);
  CHECK(cli::exit_code_of(std::runtime_error("other")) == 1);
}
