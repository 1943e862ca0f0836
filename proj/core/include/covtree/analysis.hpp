#pragma once

// Ground truth by exhaustive enumeration, accuracy comparison, the
// random-sampling baseline, greedy minimal covering configurations, report
// statistics, and result-file (de)serialization.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "covtree/engine.hpp"

namespace covtree {

struct GroundTruth {
  std::map<std::string, Interaction> interactions;        // canonical, per location
  std::map<std::string, std::vector<bool>> covering;      // predicate table by config_rank
  std::uint64_t space_size = 0;
};

/// Runs every configuration (default cap 2^22) and characterizes each covered
/// location exactly. Throws std::invalid_argument when |space| exceeds cap and
/// RunnerError when any execution fails.
GroundTruth ground_truth(const ConfigSpace& space, const Runner& runner,
                         std::uint64_t cap = 1ull << 22);

struct CompareResult {
  std::size_t exact = 0;        // truth locations matched by an equivalent inferred formula
  std::size_t total = 0;        // locations in the truth
  long long delta_cov = 0;      // |inferred locations| - |truth locations|
  std::vector<std::string> inexact;
};

CompareResult compare(const std::map<std::string, Interaction>& inferred,
                      const GroundTruth& truth, const ConfigSpace& space);
CompareResult compare_maps(const std::map<std::string, Interaction>& inferred,
                           const std::map<std::string, Interaction>& truth,
                           const ConfigSpace& space);

/// Runs n distinct uniformly sampled configurations (all of them when n >=
/// |space|), builds one tree per covered location, and post-processes. No
/// refinement loop.
std::map<std::string, Interaction> random_baseline(const ConfigSpace& space, const Runner& runner,
                                                   std::size_t n_configs, std::uint64_t seed);

struct MinCoverResult {
  std::vector<Configuration> configs;
  std::vector<std::string> unsatisfiable;  // locations whose formula nothing satisfies
};

/// Greedy cover: repeatedly conjoin mutually satisfiable uncovered
/// interactions (most-shared first) and emit one configuration satisfying the
/// conjunction, until every satisfiable interaction is covered.
MinCoverResult min_covering_configs(const std::map<std::string, Interaction>& interactions,
                                    const ConfigSpace& space);

struct RunReport {
  std::uint64_t configs = 0;
  std::size_t locations = 0;
  std::size_t interactions_total = 0;  // distinct canonical formulas
  std::size_t single = 0;
  std::size_t conj = 0;
  std::size_t disj = 0;
  std::size_t mixed = 0;
  std::size_t max_length = 0;
  double median_length = 0.0;
  bool has_truth = false;
  std::size_t exact = 0;
  std::size_t truth_total = 0;
  long long delta_cov = 0;
  // After each iteration: (cumulative executions, interactions exactly
  // matching truth). Filled only when truth is given.
  std::vector<std::pair<std::uint64_t, std::size_t>> convergence;
};

RunReport make_report(const ConfigSpace& space, const EngineResult& result,
                      const GroundTruth* truth);

struct LocationStats {
  int iteration_found = 0;
  std::uint64_t configs_at_found = 0;
};

/// Replays the iteration log: for each location, the pass at which the final
/// interaction was first obtained (and stayed), and the executions used by
/// then.
std::map<std::string, LocationStats> discovery_stats(const ConfigSpace& space,
                                                     const EngineResult& result);

// ---- result files -----------------------------------------------------------

/// Deterministic except the trailing "wall_ms" field.
std::string result_json(const ConfigSpace& space, const std::string& runner_desc,
                        const EngineParams& params, const EngineResult& result,
                        const RunReport& report, std::uint64_t wall_ms);
std::string truth_json(const ConfigSpace& space, const std::string& runner_desc,
                       const GroundTruth& truth, std::uint64_t wall_ms);

struct LoadedResult {
  ConfigSpace space;
  std::string fingerprint;
  std::map<std::string, Interaction> interactions;
};

/// Reads either result_json or truth_json output. Throws ParseError.
LoadedResult load_result_json(std::string_view text);

/// Aligned human-readable table of the report counters.
std::string report_table(const RunReport& report);
/// Per-iteration CSV: iteration,explore,configs,rebuilt[,exact,total].
std::string iteration_csv(const ConfigSpace& space, const EngineResult& result,
                          const GroundTruth* truth);
/// configs,exact,total rows of the convergence series.
std::string convergence_csv(const RunReport& report);

}  // namespace covtree
