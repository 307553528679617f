#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "bribery/equilibrium.hpp"
#include "bribery/dynamic.hpp"
#include "bribery/scenario.hpp"

namespace bribery::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kValidation = 2,
  kNonConvergence = 3,
  kSizeBound = 4,
};

/// Environment variable capping payoff-matrix cells and game-tree leaves.
inline constexpr const char* kMaxCellsEnv = "BRIBERY_MAX_CELLS";

struct Limits {
  EnumerationLimits matrix;
  TreeLimits tree;
};

/// Defaults, overridden by BRIBERY_MAX_CELLS when set.
Limits limits_from_env();

/// Each command writes its files into `out` (created if needed) and
/// returns the machine-readable report it wrote, if any.
void cmd_matrix(const Scenario& scenario, const std::filesystem::path& out,
                const std::optional<std::string>& surface_seller,
                const Limits& limits);
nlohmann::ordered_json cmd_solve(const Scenario& scenario,
                                 const std::filesystem::path& out,
                                 const Limits& limits);
Trace cmd_simulate(const Scenario& scenario, const std::filesystem::path& out,
                   const Limits& limits);
nlohmann::ordered_json cmd_fairness(const Scenario& scenario,
                                    const std::filesystem::path& out);
nlohmann::ordered_json cmd_calibrate(const std::filesystem::path& csv_in,
                                     const std::filesystem::path& out);

/// Exit code for an error escaping a command.
int exit_code_of(const std::exception& e);

/// Full command line entry point; returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace bribery::cli
