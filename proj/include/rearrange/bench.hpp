#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rearrange/instance.hpp"

namespace rearrange {

enum class Planner { kEtbm, kErbm, kTbm, kRbm, kEmcts, kMcts };
enum class Scenario { kRand, kSq };

const char* to_string(Planner p);
const char* to_string(Scenario s);
const char* to_string(Objective o);
/// Case-insensitive; throws std::invalid_argument on unknown names.
Planner parse_planner(const std::string& name);
Scenario parse_scenario(const std::string& name);
Objective parse_objective(const std::string& name);

std::vector<Planner> all_planners();

Instance generate(Scenario scenario, int n, double rho, std::uint64_t seed,
                  const Workspace& ws = Workspace());

struct PlanOutcome {
  bool success = false;
  RearrangementPlan plan;
  std::string failure;
  double seconds = 0.0;
};

/// Runs one planner with a cooperative wall-clock limit (seconds, <= 0 for
/// none). Exceptions are reported as failures.
PlanOutcome run_planner(const Instance& inst, Planner planner,
                        Objective objective, std::uint64_t seed,
                        double time_limit);

struct TrialRecord {
  Scenario scenario = Scenario::kRand;
  int n = 0;
  double rho = 0.0;
  Planner mode = Planner::kErbm;
  Objective objective = Objective::kPickPlace;
  int trial = 0;
  std::uint64_t seed = 0;
  bool success = false;
  std::optional<std::size_t> plan_len;
  std::optional<double> len_per_obj;
  std::optional<double> ti_cost;
  double time_s = 0.0;
};

/// Per (cell, mode) summary over successful trials.
struct AggregateRecord {
  Scenario scenario = Scenario::kRand;
  int n = 0;
  double rho = 0.0;
  Planner mode = Planner::kErbm;
  Objective objective = Objective::kPickPlace;
  int trials = 0;
  int successes = 0;
  std::optional<double> plan_len;
  std::optional<double> len_per_obj;
  std::optional<double> ti_cost;
  std::optional<double> time_s;

  double success_rate() const {
    return trials > 0 ? static_cast<double>(successes) / trials : 0.0;
  }
};

struct SuiteConfig {
  Scenario scenario = Scenario::kRand;
  std::vector<int> ns{10};
  std::vector<double> rhos{0.3};
  std::vector<Planner> modes = all_planners();
  Objective objective = Objective::kPickPlace;
  int trials = 1;
  double time_limit = 600.0;
  std::uint64_t seed = 0;
  int jobs = 1;
  Workspace workspace;
};

struct SuiteResult {
  /// Grid-major, then trial, then mode in configuration order.
  std::vector<TrialRecord> trials;
  /// Grid-major, then mode.
  std::vector<AggregateRecord> aggregates;
};

/// Instance seed for one (cell, trial) of a suite.
std::uint64_t trial_seed(std::uint64_t master, std::size_t cell, int trial);

/// Every mode in a cell runs on the same generated instance.
SuiteResult run_suite(const SuiteConfig& config);

inline constexpr const char* kCsvHeader =
    "scenario,n,rho,mode,objective,trial,seed,success,plan_len,len_per_obj,"
    "ti_cost,time_s";

/// Header, then each cell's trial rows followed by its aggregate rows. In
/// aggregate rows `trial` reads "mean", `seed` is empty, and `success` holds
/// the success rate.
void write_csv(const SuiteResult& result, std::ostream& out);

}  // namespace rearrange
