#include "covtree/runner.hpp"

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace covtree {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

const ConfigSpace& fig2_space() {
  static const ConfigSpace space = parse_space(
      "s: 0,1\n"
      "t: 0,1\n"
      "u: 0,1\n"
      "v: 0,1\n"
      "a: 0,1,2\n"
      "b: 0,1,2\n"
      "c: 0,1,2\n"
      "d: 0,1,2\n"
      "e: 0,1,2\n");
  return space;
}

const ConfigSpace& c50limit_space() {
  static const ConfigSpace space = parse_space(
      "s: 0,1\n"
      "t: 0,1\n"
      "z: 0,1,2,3,4\n");
  return space;
}

// Nine print sites guarded by the option logic below; L3 and L5 return early,
// so L6 onward is unreachable from them.
CoverageSet eval_fig2(const Configuration& c) {
  const bool s = c[0], u = c[2], v = c[3];
  const int a = c[4], b = c[5], cc = c[6], d = c[7], e = c[8];
  CoverageSet out{"L0"};
  if (a == 1 || b == 2) {
    out.insert("L1");
  } else if (cc == 0 && d == 1) {
    out.insert("L2");
  }
  if (u && v) {
    out.insert("L3");
    return out;
  }
  out.insert("L4");
  if (s && e == 2) {
    out.insert("L5");
    return out;
  }
  out.insert("L6");
  if (e == 2) {
    out.insert("L7");
    if (u || v) out.insert("L8");
  }
  return out;
}

CoverageSet eval_c50limit(const Configuration& c) {
  const bool s = c[0], t = c[1];
  const int z = c[2];
  if (s && t && z >= 1 && z <= 3) return {"HIT"};
  return {};
}

std::string substitute_placeholders(const std::string& arg, const ConfigSpace& space,
                                    const Configuration& config) {
  std::string out;
  std::size_t pos = 0;
  while (pos < arg.size()) {
    const std::size_t open = arg.find('{', pos);
    if (open == std::string::npos) {
      out.append(arg, pos, std::string::npos);
      break;
    }
    const std::size_t close = arg.find('}', open);
    if (close == std::string::npos) {
      out.append(arg, pos, std::string::npos);
      break;
    }
    out.append(arg, pos, open - pos);
    const std::string name = arg.substr(open + 1, close - open - 1);
    auto opt = space.option_index(name);
    if (opt) {
      out += space.option(*opt).values.at(config[*opt]);
    } else {
      out.append(arg, open, close - open + 1);  // not an option; keep literally
    }
    pos = close + 1;
  }
  return out;
}

CoverageSet parse_command_output(const std::string& text) {
  CoverageSet out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.substr(0, 3) != "COV") continue;
    if (sv.size() > 3 && !std::isspace(static_cast<unsigned char>(sv[3]))) continue;
    std::string_view rest = trim(sv.substr(3));
    if (rest.empty() || rest.find_first_of(" \t") != std::string_view::npos) {
      throw RunnerError("malformed coverage line: '" + std::string(sv) + "'");
    }
    out.insert(std::string(rest));
  }
  return out;
}

CoverageSet run_command_once(const CommandBackend& backend, const ConfigSpace& space,
                             const Configuration& config) {
  std::vector<std::string> argv;
  argv.reserve(backend.argv_template.size());
  for (const std::string& arg : backend.argv_template) {
    argv.push_back(substitute_placeholders(arg, space, config));
  }
  if (argv.empty()) throw RunnerError("empty command template");

  int fds[2];
  if (pipe(fds) != 0) throw RunnerError("pipe() failed: " + std::string(std::strerror(errno)));

  const pid_t pid = fork();
  if (pid < 0) {
    close(fds[0]);
    close(fds[1]);
    throw RunnerError("fork() failed: " + std::string(std::strerror(errno)));
  }
  if (pid == 0) {
    dup2(fds[1], STDOUT_FILENO);
    close(fds[0]);
    close(fds[1]);
    std::vector<char*> cargv;
    cargv.reserve(argv.size() + 1);
    for (std::string& a : argv) cargv.push_back(a.data());
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }
  close(fds[1]);

  std::string output;
  bool timed_out = false;
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::milliseconds(static_cast<long long>(backend.timeout_s * 1000.0));
  char buf[4096];
  while (true) {
    const auto now = std::chrono::steady_clock::now();
    const long long remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    if (remaining <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{fds[0], POLLIN, 0};
    const int pr = poll(&pfd, 1, static_cast<int>(remaining));
    if (pr < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (pr == 0) {
      timed_out = true;
      break;
    }
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;  // EOF
    output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);

  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, nullptr, 0);
    throw RunnerError("command timed out after " + std::to_string(backend.timeout_s) + "s");
  }
  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const std::string what = WIFEXITED(status)
                                 ? "exited with status " + std::to_string(WEXITSTATUS(status))
                                 : "terminated by signal";
    throw RunnerError("command " + what + " (" + argv[0] + ")");
  }
  return parse_command_output(output);
}

}  // namespace

CoverageCache::CoverageCache() : mu_(std::make_unique<std::mutex>()) {}
CoverageCache::CoverageCache(CoverageCache&&) noexcept = default;
CoverageCache& CoverageCache::operator=(CoverageCache&&) noexcept = default;

bool CoverageCache::insert_if_absent(const Configuration& config, CoverageSet coverage) {
  std::lock_guard lock(*mu_);
  auto [it, inserted] = index_.emplace(config, slots_.size());
  if (!inserted) return false;
  slots_.emplace_back(config, std::move(coverage));
  return true;
}

bool CoverageCache::contains(const Configuration& config) const {
  std::lock_guard lock(*mu_);
  return index_.contains(config);
}

std::optional<CoverageSet> CoverageCache::get(const Configuration& config) const {
  std::lock_guard lock(*mu_);
  auto it = index_.find(config);
  if (it == index_.end()) return std::nullopt;
  return slots_[it->second].second;
}

std::size_t CoverageCache::size() const {
  std::lock_guard lock(*mu_);
  return slots_.size();
}

std::vector<std::pair<Configuration, CoverageSet>> CoverageCache::entries() const {
  std::lock_guard lock(*mu_);
  return slots_;
}

std::set<std::string> CoverageCache::covered_locations() const {
  std::lock_guard lock(*mu_);
  std::set<std::string> out;
  for (const auto& [config, cov] : slots_) out.insert(cov.begin(), cov.end());
  return out;
}

void CoverageCache::partition(const std::string& location,
                              std::vector<Configuration>& hits,
                              std::vector<Configuration>& misses) const {
  std::lock_guard lock(*mu_);
  hits.clear();
  misses.clear();
  for (const auto& [config, cov] : slots_) {
    (cov.contains(location) ? hits : misses).push_back(config);
  }
}

Runner Runner::builtin(std::string name) {
  builtin_space(name);  // validates
  Runner r;
  r.description_ = "builtin:" + name;
  r.backend_ = BuiltinBackend{std::move(name)};
  return r;
}

Runner Runner::oracle_db(const std::string& path, const ConfigSpace& space) {
  std::ifstream in(path);
  if (!in) throw RunnerError("cannot open oracle database '" + path + "'");
  OracleBackend backend;
  backend.path = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty()) continue;
    const std::size_t arrow = sv.find("->");
    if (arrow == std::string_view::npos) {
      throw RunnerError("oracle db " + path + " line " + std::to_string(lineno) +
                        ": expected 'v1,...,vn -> loc1;loc2;...'");
    }
    Configuration config;
    try {
      config = space.config_from_string(trim(sv.substr(0, arrow)));
    } catch (const ParseError& e) {
      throw RunnerError("oracle db " + path + " line " + std::to_string(lineno) + ": " + e.what());
    }
    CoverageSet cov;
    std::string_view rest = trim(sv.substr(arrow + 2));
    while (!rest.empty()) {
      const std::size_t semi = rest.find(';');
      std::string_view tok = trim(rest.substr(0, semi));
      if (!tok.empty()) cov.insert(std::string(tok));
      if (semi == std::string_view::npos) break;
      rest = rest.substr(semi + 1);
    }
    backend.db.emplace(std::move(config), std::move(cov));
  }
  Runner r;
  r.description_ = "oracle:" + path;
  r.backend_ = std::move(backend);
  return r;
}

Runner Runner::command(std::vector<std::string> argv_template, double timeout_s) {
  if (argv_template.empty()) throw RunnerError("empty command template");
  Runner r;
  std::string desc = "cmd:";
  for (std::size_t i = 0; i < argv_template.size(); ++i) {
    if (i) desc += ' ';
    desc += argv_template[i];
  }
  r.description_ = std::move(desc);
  r.backend_ = CommandBackend{std::move(argv_template), timeout_s};
  return r;
}

Runner Runner::spec_oracle(std::map<std::string, Interaction> formulas) {
  Runner r;
  r.description_ = "spec:<in-memory>";
  r.backend_ = SpecBackend{std::move(formulas)};
  return r;
}

Runner Runner::parse(std::string_view spec, const ConfigSpace& space, double command_timeout_s) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw RunnerError("runner spec must be builtin:NAME, oracle:FILE, or cmd:TEMPLATE");
  }
  const std::string_view kind = spec.substr(0, colon);
  const std::string rest(spec.substr(colon + 1));
  if (kind == "builtin") return builtin(rest);
  if (kind == "oracle") return oracle_db(rest, space);
  if (kind == "cmd") {
    std::istringstream in(rest);
    std::vector<std::string> argv;
    std::string tok;
    while (in >> tok) argv.push_back(tok);
    return command(std::move(argv), command_timeout_s);
  }
  throw RunnerError("unknown runner kind '" + std::string(kind) + "'");
}

CoverageSet Runner::eval(const ConfigSpace& space, const Configuration& config) const {
  if (const auto* b = std::get_if<BuiltinBackend>(&backend_)) {
    return eval_builtin(b->name, space, config);
  }
  if (const auto* o = std::get_if<OracleBackend>(&backend_)) {
    auto it = o->db.find(config);
    if (it == o->db.end()) {
      // An absent record must not read as an empty coverage set.
      throw RunnerError("configuration not in oracle database: " +
                        space.config_to_string(config));
    }
    return it->second;
  }
  if (const auto* c = std::get_if<CommandBackend>(&backend_)) {
    return run_command_once(*c, space, config);
  }
  return eval_spec(std::get<SpecBackend>(backend_).formulas, config);
}

std::vector<std::string> builtin_names() { return {"fig2", "c50limit"}; }

const ConfigSpace& builtin_space(std::string_view name) {
  if (name == "fig2") return fig2_space();
  if (name == "c50limit") return c50limit_space();
  throw RunnerError("unknown builtin program '" + std::string(name) + "'");
}

CoverageSet eval_builtin(std::string_view name, const ConfigSpace& space,
                         const Configuration& config) {
  const ConfigSpace& expected = builtin_space(name);
  if (!(space == expected)) {
    throw RunnerError("space does not match builtin '" + std::string(name) + "'");
  }
  if (!space.contains(config)) {
    throw RunnerError("configuration outside the builtin's space");
  }
  return name == "fig2" ? eval_fig2(config) : eval_c50limit(config);
}

CoverageSet eval_spec(const std::map<std::string, Interaction>& spec,
                      const Configuration& config) {
  CoverageSet out;
  for (const auto& [location, formula] : spec) {
    if (formula.evaluate(config)) out.insert(location);
  }
  return out;
}

RunOutcome run_configs(const Runner& runner, const ConfigSpace& space, CoverageCache& cache,
                       const std::vector<Configuration>& configs) {
  // Unique uncached configurations, in first-appearance order.
  std::vector<Configuration> pending;
  {
    std::unordered_set<Configuration, ConfigurationHash> seen;
    for (const Configuration& c : configs) {
      if (!cache.contains(c) && seen.insert(c).second) pending.push_back(c);
    }
  }

  RunOutcome outcome;
  std::mutex err_mu;
  const int jobs = std::min<int>(runner.jobs(), static_cast<int>(pending.size()));
  if (jobs > 1) {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= pending.size()) return;
        try {
          cache.insert_if_absent(pending[i], runner.eval(space, pending[i]));
        } catch (const std::exception& e) {
          std::lock_guard lock(err_mu);
          outcome.errors.emplace_back(pending[i], e.what());
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  } else {
    for (const Configuration& c : pending) {
      try {
        cache.insert_if_absent(c, runner.eval(space, c));
      } catch (const std::exception& e) {
        outcome.errors.emplace_back(c, e.what());
      }
    }
  }

  if (!pending.empty() && outcome.errors.size() == pending.size()) {
    throw RunnerError("all " + std::to_string(pending.size()) +
                      " configurations failed; first error: " + outcome.errors.front().second);
  }
  for (const Configuration& c : configs) {
    if (auto cov = cache.get(c)) outcome.results.emplace(c, std::move(*cov));
  }
  return outcome;
}

std::vector<Configuration> nondeterministic_configs(const Runner& runner, const ConfigSpace& space,
                                                    const std::vector<Configuration>& configs,
                                                    int k) {
  std::vector<Configuration> out;
  if (k < 2) return out;
  for (const Configuration& c : configs) {
    const CoverageSet first = runner.eval(space, c);
    for (int i = 1; i < k; ++i) {
      if (runner.eval(space, c) != first) {
        out.push_back(c);
        break;
      }
    }
  }
  return out;
}

}  // namespace covtree
