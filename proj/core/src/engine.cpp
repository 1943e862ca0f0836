#include "covtree/engine.hpp"

#include <algorithm>
#include <unordered_set>

#include "rng.hpp"

namespace covtree {

namespace {

// 1-way covering rows over a subset of options; remaining positions are taken
// from `base`. Same column construction as one_way_covering.
std::vector<Configuration> covering_rows(const ConfigSpace& space,
                                         const std::vector<std::size_t>& free_options,
                                         const Configuration& base, detail::Rng& rng) {
  std::size_t rows = 1;
  for (std::size_t opt : free_options) rows = std::max(rows, space.domain_size(opt));
  std::vector<Configuration> out(rows, base);
  for (std::size_t opt : free_options) {
    const std::size_t k = space.domain_size(opt);
    std::vector<ValueIndex> column(k);
    for (std::size_t v = 0; v < k; ++v) column[v] = static_cast<ValueIndex>(v);
    rng.shuffle(column);
    for (std::size_t row = 0; row < rows; ++row) {
      out[row].set(opt, row < k ? column[row] : static_cast<ValueIndex>(rng.below(k)));
    }
  }
  return out;
}

}  // namespace

std::vector<TreePath> select_paths(const DecisionTree& tree, bool explore, std::uint64_t seed) {
  std::vector<TreePath> ranked = rank_paths(tree, detail::derive_seed(seed, 0));
  if (explore && !ranked.empty()) {
    detail::Rng rng(detail::derive_seed(seed, 1));
    const std::vector<TreePath> all = tree.paths();
    TreePath pick = all[rng.below(all.size())];
    if (std::find(ranked.begin(), ranked.end(), pick) == ranked.end()) {
      ranked.push_back(std::move(pick));
    }
  }
  return ranked;
}

std::vector<Configuration> gen_new_configs(const std::vector<TreePath>& paths,
                                           const ConfigSpace& space, const CoverageCache& cache,
                                           std::size_t min_new, std::uint64_t seed) {
  detail::Rng rng(seed);
  std::vector<Configuration> out;
  std::unordered_set<Configuration, ConfigurationHash> chosen;
  for (const TreePath& path : paths) {
    Configuration base(std::vector<ValueIndex>(space.option_count(), 0));
    std::vector<bool> is_fixed(space.option_count(), false);
    for (const Setting& s : path.settings) {
      base.set(s.option, s.value);
      is_fixed[s.option] = true;
    }
    std::vector<std::size_t> free_options;
    for (std::size_t o = 0; o < space.option_count(); ++o) {
      if (!is_fixed[o]) free_options.push_back(o);
    }
    for (Configuration& row : covering_rows(space, free_options, base, rng)) {
      if (cache.contains(row)) continue;
      if (chosen.insert(row).second) out.push_back(std::move(row));
    }
    if (out.size() >= min_new) break;
  }
  return out;
}

std::map<std::string, Interaction> post_process(const std::map<std::string, DecisionTree>& trees,
                                                const ConfigSpace& space) {
  std::map<std::string, Interaction> out;
  for (const auto& [location, tree] : trees) {
    out.emplace(location, canonicalize(from_tree(tree), space).formula);
  }
  return out;
}

EngineResult run_engine(const ConfigSpace& space, const Runner& runner,
                        const EngineParams& params) {
  if (params.max_explore_iters < 1) throw std::invalid_argument("max_explore_iters must be >= 1");
  if (params.min_new_configs < 1) throw std::invalid_argument("min_new_configs must be >= 1");

  EngineResult result;

  auto budget_left = [&]() -> std::uint64_t {
    if (!params.config_budget) return UINT64_MAX;
    const std::uint64_t used = result.cache.size();
    return used >= *params.config_budget ? 0 : *params.config_budget - used;
  };

  // Executes a batch, trimming it to the remaining budget (cache hits are free).
  auto run_batch = [&](const std::vector<Configuration>& batch) {
    std::vector<Configuration> trimmed;
    std::uint64_t fresh = 0;
    const std::uint64_t allowed = budget_left();
    for (const Configuration& c : batch) {
      if (result.cache.contains(c)) {
        trimmed.push_back(c);
        continue;
      }
      if (fresh < allowed) {
        trimmed.push_back(c);
        ++fresh;
      } else {
        result.budget_exhausted = true;
      }
    }
    run_configs(runner, space, result.cache, trimmed);
  };

  {
    std::vector<Configuration> init = params.initial_configs;
    for (Configuration& c : one_way_covering(space, detail::derive_seed(params.seed, 0x1717))) {
      init.push_back(std::move(c));
    }
    run_batch(init);
  }

  std::map<std::string, DecisionTree> trees;
  std::vector<Configuration> hits, misses;
  int explore_iters = 0;
  int pass = 0;

  while (explore_iters < params.max_explore_iters && !result.budget_exhausted) {
    ++pass;
    ++explore_iters;
    const bool explore = explore_iters > 1;
    IterationRecord rec;
    rec.pass = pass;
    rec.explore = explore;

    // Locations first covered mid-pass are swept within the same pass.
    std::set<std::string> processed;
    while (true) {
      std::vector<std::string> todo;
      for (const std::string& loc : result.cache.covered_locations()) {
        if (!processed.contains(loc)) todo.push_back(loc);
      }
      if (todo.empty()) break;
      for (const std::string& location : todo) {
        processed.insert(location);
        result.cache.partition(location, hits, misses);
        auto it = trees.find(location);
        const bool need_rebuild =
            it == trees.end() || !test_tree(it->second, hits, misses);
        if (!need_rebuild && !explore) continue;
        if (need_rebuild) {
          explore_iters = 0;
          const std::uint64_t executions_now = result.cache.size();
          DecisionTree tree = build_tree(hits, misses, space);
          rec.rebuilt[location] =
              RebuildInfo{render_formula(from_tree(tree), space), executions_now};
          trees.insert_or_assign(location, std::move(tree));
        }
        if (budget_left() == 0) {
          result.budget_exhausted = true;
          continue;  // keep rebuilding remaining locations, stop generating
        }
        const std::uint64_t loc_seed = detail::derive_seed(
            params.seed, static_cast<std::uint64_t>(pass), detail::hash_str(location));
        const std::vector<TreePath> paths = select_paths(trees.at(location), explore, loc_seed);
        std::vector<Configuration> fresh =
            gen_new_configs(paths, space, result.cache,
                            static_cast<std::size_t>(params.min_new_configs),
                            detail::derive_seed(loc_seed, 0x9e37));
        if (explore && !paths.empty()) {
          // Ranked refinement alone would keep probing the same fragile
          // region; one random path per stable pass gives the lower-ranked
          // ones a chance.
          detail::Rng rng(detail::derive_seed(loc_seed, 1));
          const std::vector<TreePath> all = trees.at(location).paths();
          const TreePath& pick = all[rng.below(all.size())];
          for (Configuration& c :
               gen_new_configs({pick}, space, result.cache, 1,
                               detail::derive_seed(loc_seed, 0x517c))) {
            fresh.push_back(std::move(c));
          }
        }
        run_batch(fresh);
      }
    }
    rec.executions_after = result.cache.size();
    result.log.push_back(std::move(rec));
  }

  // Reconciliation: configs generated in the last passes may have invalidated
  // trees nobody re-checked; rebuild so every final tree fits the final data.
  {
    IterationRecord rec;
    rec.pass = pass + 1;
    for (const std::string& location : result.cache.covered_locations()) {
      result.cache.partition(location, hits, misses);
      auto it = trees.find(location);
      if (it != trees.end() && test_tree(it->second, hits, misses)) continue;
      const std::uint64_t executions_now = result.cache.size();
      DecisionTree tree = build_tree(hits, misses, space);
      rec.rebuilt[location] =
          RebuildInfo{render_formula(from_tree(tree), space), executions_now};
      trees.insert_or_assign(location, std::move(tree));
    }
    if (!rec.rebuilt.empty()) {
      rec.executions_after = result.cache.size();
      result.log.push_back(std::move(rec));
    }
  }

  result.executions = result.cache.size();
  result.interactions = post_process(trees, space);
  result.trees = std::move(trees);
  return result;
}

}  // namespace covtree
