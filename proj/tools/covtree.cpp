// covtree command-line front end: run the refinement engine, compute ground
// truth, compare result files, run the random baseline, compute minimal
// covering configurations, or run the built-in end-to-end demo.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "covtree/analysis.hpp"
#include "covtree/engine.hpp"

namespace {

using namespace covtree;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBackend = 2;

struct CommonOpts {
  std::string space_file;
  std::string runner_spec;
  std::string out_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  double timeout_s = 10.0;
  std::string log_level = "info";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_runner) {
  cmd->add_option("--space", opts.space_file, "Space file (defaults to the builtin's space)");
  auto* runner = cmd->add_option("--runner", opts.runner_spec,
                                 "builtin:NAME | oracle:FILE | cmd:TEMPLATE");
  if (needs_runner) runner->required();
  cmd->add_option("--seed", opts.seed, "Random seed");
  cmd->add_option("--out", opts.out_path, "Write result JSON here");
  cmd->add_option("--jobs", opts.jobs, "Parallel backend executions")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", opts.timeout_s, "Per-execution timeout for cmd backends (s)");
  cmd->add_option("--log-level", opts.log_level, "quiet | info | debug")
      ->check(CLI::IsMember({"quiet", "info", "debug"}));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << content;
}

// Oracle files are opened before any space handling so a missing database is
// reported as a backend failure, not a usage error.
void preflight_runner(const std::string& spec) {
  if (spec.rfind("oracle:", 0) == 0) {
    const std::string path = spec.substr(7);
    if (!std::filesystem::exists(path)) {
      throw RunnerError("cannot open oracle database '" + path + "'");
    }
  }
}

ConfigSpace resolve_space(const CommonOpts& opts) {
  if (!opts.space_file.empty()) return parse_space(read_file(opts.space_file));
  if (opts.runner_spec.rfind("builtin:", 0) == 0) {
    return builtin_space(opts.runner_spec.substr(8));
  }
  throw ParseError("--space is required unless the runner is a builtin");
}

Runner resolve_runner(const CommonOpts& opts, const ConfigSpace& space) {
  Runner runner = Runner::parse(opts.runner_spec, space, opts.timeout_s);
  runner.set_jobs(opts.jobs);
  return runner;
}

std::vector<Configuration> load_config_lines(const std::string& path, const ConfigSpace& space) {
  std::vector<Configuration> out;
  std::istringstream in(read_file(path));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    if (sv.empty() || sv.front() == '#') continue;
    try {
      out.push_back(space.config_from_string(sv));
    } catch (const ParseError& e) {
      throw ParseError(std::string(e.what()) + " (" + path + " line " + std::to_string(lineno) +
                       ")");
    }
  }
  return out;
}

RunReport map_report(const ConfigSpace& space, const std::map<std::string, Interaction>& formulas,
                     std::uint64_t configs) {
  // Shares the counting rules with make_report via a throwaway EngineResult.
  EngineResult pseudo;
  pseudo.interactions = formulas;
  pseudo.executions = configs;
  return make_report(space, pseudo, nullptr);
}

std::uint64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
  return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count());
}

int cmd_run(const CommonOpts& opts, const EngineParams& params_in,
            const std::string& initial_configs_file, const std::string& truth_file,
            const std::string& log_csv, int rerun_k) {
  preflight_runner(opts.runner_spec);
  const ConfigSpace space = resolve_space(opts);
  const Runner runner = resolve_runner(opts, space);

  EngineParams params = params_in;
  params.seed = opts.seed;
  if (!initial_configs_file.empty()) {
    params.initial_configs = load_config_lines(initial_configs_file, space);
  }

  std::optional<GroundTruth> truth;
  if (!truth_file.empty()) {
    LoadedResult loaded = load_result_json(read_file(truth_file));
    if (loaded.fingerprint != space.fingerprint()) {
      throw ParseError("truth file '" + truth_file + "' is for a different space");
    }
    truth.emplace();
    truth->interactions = std::move(loaded.interactions);
  }

  const auto start = std::chrono::steady_clock::now();
  EngineResult result = run_engine(space, runner, params);
  const std::uint64_t wall = elapsed_ms(start);

  const RunReport report = make_report(space, result, truth ? &*truth : nullptr);
  if (!opts.out_path.empty()) {
    write_file(opts.out_path,
               result_json(space, runner.description(), params, result, report, wall));
  }
  if (!log_csv.empty()) {
    write_file(log_csv, iteration_csv(space, result, truth ? &*truth : nullptr));
  }

  if (rerun_k >= 2) {
    std::vector<Configuration> explored;
    for (auto& [config, cov] : result.cache.entries()) explored.push_back(config);
    const auto unstable = nondeterministic_configs(runner, space, explored, rerun_k);
    std::cerr << "rerun check: " << unstable.size() << " of " << explored.size()
              << " configurations changed coverage across " << rerun_k << " runs\n";
    for (const Configuration& c : unstable) {
      std::cerr << "  " << space.config_to_string(c) << '\n';
    }
  }

  if (opts.log_level == "debug") {
    for (const IterationRecord& rec : result.log) {
      std::cerr << "pass " << rec.pass << (rec.explore ? " (explore)" : "") << ": "
                << rec.executions_after << " configs, " << rec.rebuilt.size() << " rebuilt\n";
    }
  }
  if (opts.log_level != "quiet") {
    std::cerr << "engine: " << result.executions << " executions, " << result.log.size()
              << " iterations, " << result.interactions.size() << " locations, " << wall
              << " ms\n";
    if (result.budget_exhausted) std::cerr << "engine: stopped by --budget\n";
  }
  std::cout << report_table(report);
  return kExitOk;
}

int cmd_truth(const CommonOpts& opts, std::uint64_t cap) {
  preflight_runner(opts.runner_spec);
  const ConfigSpace space = resolve_space(opts);
  Runner runner = resolve_runner(opts, space);
  const auto start = std::chrono::steady_clock::now();
  const GroundTruth truth = ground_truth(space, runner, cap);
  const std::uint64_t wall = elapsed_ms(start);
  if (!opts.out_path.empty()) {
    write_file(opts.out_path, truth_json(space, runner.description(), truth, wall));
  }
  const RunReport report = map_report(space, truth.interactions, truth.space_size);
  std::cout << report_table(report);
  return kExitOk;
}

int cmd_compare(const std::string& inferred_file, const std::string& truth_file) {
  const LoadedResult inferred = load_result_json(read_file(inferred_file));
  const LoadedResult truth = load_result_json(read_file(truth_file));
  if (inferred.fingerprint != truth.fingerprint) {
    throw ParseError("result files describe different spaces (fingerprints " +
                     inferred.fingerprint + " vs " + truth.fingerprint + ")");
  }
  const CompareResult cmp = compare_maps(inferred.interactions, truth.interactions, truth.space);
  std::cout << "exact " << cmp.exact << " / " << cmp.total << "\n"
            << "delta cov " << cmp.delta_cov << "\n";
  for (const std::string& loc : cmp.inexact) std::cout << "inexact " << loc << "\n";
  return kExitOk;
}

int cmd_baseline(const CommonOpts& opts, std::size_t n_configs) {
  preflight_runner(opts.runner_spec);
  const ConfigSpace space = resolve_space(opts);
  const Runner runner = resolve_runner(opts, space);
  const auto start = std::chrono::steady_clock::now();
  const auto interactions = random_baseline(space, runner, n_configs, opts.seed);
  const std::uint64_t wall = elapsed_ms(start);
  if (!opts.out_path.empty()) {
    GroundTruth shaped;
    shaped.interactions = interactions;
    shaped.space_size = n_configs;
    write_file(opts.out_path, truth_json(space, runner.description(), shaped, wall));
  }
  std::cout << report_table(map_report(space, interactions, n_configs));
  return kExitOk;
}

int cmd_mincov(const std::string& interactions_file, const std::string& out_path) {
  const LoadedResult loaded = load_result_json(read_file(interactions_file));
  const MinCoverResult cover = min_covering_configs(loaded.interactions, loaded.space);
  for (const std::string& loc : cover.unsatisfiable) {
    std::cerr << "skipped unsatisfiable interaction for " << loc << "\n";
  }
  std::cout << "covering configurations: " << cover.configs.size() << "\n";
  for (const Configuration& c : cover.configs) {
    std::cout << loaded.space.config_to_string(c) << "\n";
  }
  if (!out_path.empty()) {
    nlohmann::ordered_json doc;
    doc["space"] = nlohmann::ordered_json{{"fingerprint", loaded.space.fingerprint()}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Configuration& c : cover.configs) arr.push_back(loaded.space.config_to_string(c));
    doc["configs"] = std::move(arr);
    write_file(out_path, doc.dump(2) + "\n");
  }
  return kExitOk;
}

// End-to-end walkthrough on the builtin fig2 program: exhaustive truth,
// engine run, comparison, and a minimal covering set.
int cmd_demo(std::uint64_t seed) {
  const ConfigSpace& space = builtin_space("fig2");
  const Runner runner = Runner::builtin("fig2");

  std::cout << "space: " << space.option_count() << " options, "
            << *space.exact_size() << " configurations\n";

  const GroundTruth truth = ground_truth(space, runner);
  std::cout << "\nground truth (exhaustive):\n";
  for (const auto& [loc, f] : truth.interactions) {
    std::cout << "  " << loc << ": " << render_formula(f, space) << "\n";
  }

  EngineParams params;
  params.seed = seed;
  const EngineResult result = run_engine(space, runner, params);
  const CompareResult cmp = compare(result.interactions, truth, space);
  std::cout << "\nengine run (seed " << seed << "): " << result.executions
            << " of " << *space.exact_size() << " configurations, " << result.log.size()
            << " iterations\n";
  const auto stats = discovery_stats(space, result);
  for (const auto& [loc, f] : result.interactions) {
    const bool ok = truth.interactions.contains(loc) &&
                    equivalent(f, truth.interactions.at(loc), space);
    const auto& st = stats.at(loc);
    std::cout << "  " << loc << ": " << render_formula(f, space)
              << (ok ? "  [exact" : "  [inexact") << ", found at iteration "
              << st.iteration_found << " with " << st.configs_at_found << " configs]\n";
  }
  std::cout << "exact " << cmp.exact << " / " << cmp.total << "\n";

  const MinCoverResult cover = min_covering_configs(truth.interactions, space);
  std::cout << "\nminimal covering configurations (" << cover.configs.size() << "):\n";
  for (const Configuration& c : cover.configs) {
    std::cout << "  " << space.config_to_string(c) << "\n";
  }
  return cmp.exact == cmp.total ? kExitOk : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learns, per covered program location, the boolean formula over "
               "configuration options that decides its coverage"};
  app.require_subcommand(1);

  CommonOpts opts;
  EngineParams params;
  std::string initial_configs_file, truth_file, log_csv;
  int rerun_k = 0;

  auto* run = app.add_subcommand("run", "Iterative interaction inference");
  add_common(run, opts, true);
  run->add_option("--max-explore", params.max_explore_iters,
                  "Consecutive stable passes before stopping")
      ->check(CLI::PositiveNumber);
  run->add_option("--min-new", params.min_new_configs, "Minimum new configs per location and pass")
      ->check(CLI::PositiveNumber);
  std::uint64_t budget = 0;
  auto* budget_opt = run->add_option("--budget", budget, "Max backend executions");
  run->add_option("--initial-configs", initial_configs_file, "File with one configuration per line");
  run->add_option("--truth", truth_file, "Truth JSON for exactness reporting");
  run->add_option("--log-csv", log_csv, "Write the per-iteration CSV log here");
  run->add_option("--rerun", rerun_k, "Re-execute every explored config K times and report drift");

  auto* truth_cmd = app.add_subcommand("truth", "Exhaustive ground-truth interactions");
  std::uint64_t cap = 1ull << 22;
  add_common(truth_cmd, opts, true);
  truth_cmd->add_option("--cap", cap, "Refuse spaces larger than this");

  auto* compare_cmd = app.add_subcommand("compare", "Compare two result files");
  std::string inferred_file, compare_truth_file;
  compare_cmd->add_option("--inferred", inferred_file, "Inferred result JSON")->required();
  compare_cmd->add_option("--truth", compare_truth_file, "Truth result JSON")->required();

  auto* baseline_cmd = app.add_subcommand("baseline", "Trees from random configurations only");
  std::size_t n_configs = 0;
  add_common(baseline_cmd, opts, true);
  baseline_cmd->add_option("--n-configs", n_configs, "Number of random configurations")
      ->required()
      ->check(CLI::PositiveNumber);

  auto* mincov_cmd = app.add_subcommand("mincov", "Minimal covering configurations");
  std::string interactions_file;
  mincov_cmd->add_option("--interactions", interactions_file, "Result JSON with interactions")
      ->required();
  mincov_cmd->add_option("--out", opts.out_path, "Write the covering set as JSON");

  auto* demo_cmd = app.add_subcommand("demo", "End-to-end walkthrough on builtin:fig2");
  demo_cmd->add_option("--seed", opts.seed, "Random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (budget_opt->count() > 0) params.config_budget = budget;
    if (run->parsed()) {
      return cmd_run(opts, params, initial_configs_file, truth_file, log_csv, rerun_k);
    }
    if (truth_cmd->parsed()) return cmd_truth(opts, cap);
    if (compare_cmd->parsed()) return cmd_compare(inferred_file, compare_truth_file);
    if (baseline_cmd->parsed()) return cmd_baseline(opts, n_configs);
    if (mincov_cmd->parsed()) return cmd_mincov(interactions_file, opts.out_path);
    if (demo_cmd->parsed()) return cmd_demo(opts.seed);
  } catch (const RunnerError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBackend;
  }
  return kExitUsage;
}
