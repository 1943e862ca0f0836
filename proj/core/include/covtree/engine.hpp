#pragma once

// The iterative refinement loop: seed with a 1-way covering array, build one
// decision tree per covered location, generate new configurations from
// fragile tree paths, and repeat until the trees survive several consecutive
// passes unchanged.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "covtree/dtree.hpp"
#include "covtree/formula.hpp"
#include "covtree/runner.hpp"
#include "covtree/space.hpp"

namespace covtree {

struct EngineParams {
  int max_explore_iters = 5;  // consecutive stable passes before stopping
  int min_new_configs = 2;    // per location and pass
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> config_budget;  // backend executions, not cache hits
  std::vector<Configuration> initial_configs;
};

struct RebuildInfo {
  std::string formula_dnf;        // raw disjunction of hit paths at build time
  std::uint64_t executions = 0;   // cumulative executions when the tree was built
};

struct IterationRecord {
  int pass = 0;
  bool explore = false;
  std::uint64_t executions_after = 0;
  std::map<std::string, RebuildInfo> rebuilt;
};

struct EngineResult {
  CoverageCache cache;
  std::map<std::string, DecisionTree> trees;
  std::map<std::string, Interaction> interactions;  // canonicalized
  std::vector<IterationRecord> log;
  std::uint64_t executions = 0;
  bool budget_exhausted = false;
};

/// Runs the refinement loop to completion (stability or budget). Runner
/// failures propagate as RunnerError.
EngineResult run_engine(const ConfigSpace& space, const Runner& runner,
                        const EngineParams& params);

/// Exploit mode: ranked paths. Explore mode: ranked paths plus one
/// seeded-uniform random path appended (list kept duplicate-free).
std::vector<TreePath> select_paths(const DecisionTree& tree, bool explore, std::uint64_t seed);

/// Walks paths in the given order; per path, emits a seeded 1-way covering
/// array over the options the path leaves free (path settings fixed in every
/// row), skipping cached rows, until at least min_new uncached configurations
/// are collected or the paths run out.
std::vector<Configuration> gen_new_configs(const std::vector<TreePath>& paths,
                                           const ConfigSpace& space, const CoverageCache& cache,
                                           std::size_t min_new, std::uint64_t seed);

/// Canonicalized disjunction of hit-path conditions per location.
std::map<std::string, Interaction> post_process(const std::map<std::string, DecisionTree>& trees,
                                                const ConfigSpace& space);

}  // namespace covtree
