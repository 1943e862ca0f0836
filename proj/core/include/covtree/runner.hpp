#pragma once

// Coverage backends (built-in demo programs, oracle databases, external
// commands, in-memory formula oracles) behind a deduplicating cache: no
// configuration is executed twice.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "covtree/formula.hpp"
#include "covtree/space.hpp"

namespace covtree {

using CoverageSet = std::set<std::string>;

class RunnerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thread-safe map Configuration -> CoverageSet with first-writer-wins
/// insertion and stable insertion order.
class CoverageCache {
 public:
  CoverageCache();
  CoverageCache(CoverageCache&&) noexcept;
  CoverageCache& operator=(CoverageCache&&) noexcept;

  /// First writer wins; returns whether this call inserted.
  bool insert_if_absent(const Configuration& config, CoverageSet coverage);
  bool contains(const Configuration& config) const;
  std::optional<CoverageSet> get(const Configuration& config) const;
  std::size_t size() const;

  /// Snapshot in insertion (exploration) order.
  std::vector<std::pair<Configuration, CoverageSet>> entries() const;
  std::set<std::string> covered_locations() const;

  /// Splits cached configurations into those covering `location` and those
  /// not, in insertion order.
  void partition(const std::string& location,
                 std::vector<Configuration>& hits,
                 std::vector<Configuration>& misses) const;

 private:
  mutable std::unique_ptr<std::mutex> mu_;
  std::unordered_map<Configuration, std::size_t, ConfigurationHash> index_;
  std::vector<std::pair<Configuration, CoverageSet>> slots_;
};

struct BuiltinBackend {
  std::string name;
};
struct OracleBackend {
  std::string path;
  std::unordered_map<Configuration, CoverageSet, ConfigurationHash> db;
};
struct CommandBackend {
  std::vector<std::string> argv_template;  // {name} placeholders
  double timeout_s = 10.0;
};
struct SpecBackend {
  std::map<std::string, Interaction> formulas;
};

class Runner {
 public:
  /// Throws RunnerError for an unknown builtin name.
  static Runner builtin(std::string name);
  /// Loads the whole database now; throws RunnerError on IO or format errors.
  static Runner oracle_db(const std::string& path, const ConfigSpace& space);
  static Runner command(std::vector<std::string> argv_template, double timeout_s = 10.0);
  static Runner spec_oracle(std::map<std::string, Interaction> formulas);

  /// "builtin:NAME" | "oracle:FILE" | "cmd:TEMPLATE" (template split on
  /// whitespace). Throws RunnerError on anything else.
  static Runner parse(std::string_view spec, const ConfigSpace& space,
                      double command_timeout_s = 10.0);

  /// Executes one configuration. Pure for builtin/oracle/spec backends.
  /// Throws RunnerError on backend failure.
  CoverageSet eval(const ConfigSpace& space, const Configuration& config) const;

  int jobs() const noexcept { return jobs_; }
  void set_jobs(int jobs) { jobs_ = jobs < 1 ? 1 : jobs; }
  const std::string& description() const noexcept { return description_; }
  bool is_command() const noexcept { return std::holds_alternative<CommandBackend>(backend_); }

 private:
  std::variant<BuiltinBackend, OracleBackend, CommandBackend, SpecBackend> backend_;
  std::string description_;
  int jobs_ = 1;
};

/// Names of the built-in demo programs ("fig2", "c50limit").
std::vector<std::string> builtin_names();
/// The configuration space a builtin expects.
const ConfigSpace& builtin_space(std::string_view name);
/// Pure evaluation of a builtin; throws RunnerError on unknown name or a
/// space that does not match the builtin's.
CoverageSet eval_builtin(std::string_view name, const ConfigSpace& space,
                         const Configuration& config);

/// Locations whose formula the configuration satisfies.
CoverageSet eval_spec(const std::map<std::string, Interaction>& spec,
                      const Configuration& config);

struct RunOutcome {
  std::map<Configuration, CoverageSet> results;           // exactly the inputs that succeeded
  std::vector<std::pair<Configuration, std::string>> errors;
};

/// Executes the uncached configurations (optionally in runner.jobs() threads),
/// caches first results, and reports per-config failures. Throws RunnerError
/// only when every configuration in the executed batch failed.
RunOutcome run_configs(const Runner& runner, const ConfigSpace& space, CoverageCache& cache,
                       const std::vector<Configuration>& configs);

/// Diagnostic for non-deterministic backends: runs each configuration k times
/// (no caching) and returns those whose coverage differed.
std::vector<Configuration> nondeterministic_configs(const Runner& runner, const ConfigSpace& space,
                                                    const std::vector<Configuration>& configs,
                                                    int k);

}  // namespace covtree
