#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "covtree/analysis.hpp"
#include "test_util.hpp"

#ifdef COVTREE_CLI_PATH

using namespace covtree;

namespace {

namespace fs = std::filesystem;

struct CliOutcome {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("covtree_cli_" + std::to_string(getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliOutcome run_cli(const std::string& args) {
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(COVTREE_CLI_PATH) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  CliOutcome o;
  o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

// Result files are byte-identical except wall_ms.
std::string strip_wall_ms(std::string text) {
  const auto pos = text.find("\"wall_ms\"");
  if (pos == std::string::npos) return text;
  const auto end = text.find('\n', pos);
  text.erase(pos, end == std::string::npos ? std::string::npos : end - pos);
  return text;
}

}  // namespace

TEST_CASE("cli: run on the builtin demo program writes 9 interactions") {
  const fs::path out = work_dir() / "run7.json";
  const auto r = run_cli("run --runner builtin:fig2 --seed 7 --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("configs") != std::string::npos);
  const LoadedResult loaded = load_result_json(slurp(out));
  CHECK(loaded.interactions.size() == 9);
  CHECK(loaded.fingerprint == builtin_space("fig2").fingerprint());
}

TEST_CASE("cli: same argv and seed give byte-identical result JSON") {
  const fs::path a = work_dir() / "det_a.json";
  const fs::path b = work_dir() / "det_b.json";
  CHECK(run_cli("run --runner builtin:fig2 --seed 3 --out " + a.string()).exit_code == 0);
  CHECK(run_cli("run --runner builtin:fig2 --seed 3 --out " + b.string()).exit_code == 0);
  CHECK(strip_wall_ms(slurp(a)) == strip_wall_ms(slurp(b)));
  CHECK(slurp(a).find("\"wall_ms\"") != std::string::npos);
}

TEST_CASE("cli: truth writes exhaustive interactions") {
  const fs::path out = work_dir() / "truth.json";
  const auto r = run_cli("truth --runner builtin:c50limit --out " + out.string());
  CHECK(r.exit_code == 0);
  const LoadedResult loaded = load_result_json(slurp(out));
  REQUIRE(loaded.interactions.size() == 1);
  CHECK(render_formula(loaded.interactions.at("HIT"), loaded.space) ==
        "s=1 & t=1 & z in {1,2,3}");
}

TEST_CASE("cli: compare of a file against itself is fully exact") {
  const fs::path out = work_dir() / "cmp.json";
  REQUIRE(run_cli("truth --runner builtin:fig2 --out " + out.string()).exit_code == 0);
  const auto r = run_cli("compare --inferred " + out.string() + " --truth " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("exact 9 / 9") != std::string::npos);
  CHECK(r.out.find("delta cov 0") != std::string::npos);
}

TEST_CASE("cli: compare refuses files from different spaces") {
  const fs::path a = work_dir() / "s1.json";
  const fs::path b = work_dir() / "s2.json";
  REQUIRE(run_cli("truth --runner builtin:fig2 --out " + a.string()).exit_code == 0);
  REQUIRE(run_cli("truth --runner builtin:c50limit --out " + b.string()).exit_code == 0);
  const auto r = run_cli("compare --inferred " + a.string() + " --truth " + b.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("different spaces") != std::string::npos);
}

TEST_CASE("cli: run with a truth file reports exactness and writes the CSV log") {
  const fs::path truth = work_dir() / "t.json";
  const fs::path csv = work_dir() / "log.csv";
  REQUIRE(run_cli("truth --runner builtin:fig2 --out " + truth.string()).exit_code == 0);
  const auto r = run_cli("run --runner builtin:fig2 --seed 1 --truth " + truth.string() +
                         " --log-csv " + csv.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("exact") != std::string::npos);
  CHECK(slurp(csv).rfind("iteration,explore,configs,rebuilt,exact,total\n", 0) == 0);
}

TEST_CASE("cli: missing oracle database fails with the backend exit code") {
  const auto r = run_cli("run --runner oracle:missing.db");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("cannot open oracle database") != std::string::npos);
}

TEST_CASE("cli: usage errors exit with 1") {
  CHECK(run_cli("definitely-not-a-subcommand").exit_code == 1);
  CHECK(run_cli("run").exit_code == 1);              // --runner is required
  CHECK(run_cli("compare --inferred x.json").exit_code == 1);
}

TEST_CASE("cli: baseline writes a loadable result") {
  const fs::path out = work_dir() / "base.json";
  const auto r = run_cli("baseline --runner builtin:fig2 --n-configs 40 --seed 5 --out " +
                         out.string());
  CHECK(r.exit_code == 0);
  CHECK(load_result_json(slurp(out)).interactions.size() >= 1);
}

TEST_CASE("cli: mincov prints a covering set for the truth interactions") {
  const fs::path truth = work_dir() / "mincov_truth.json";
  REQUIRE(run_cli("truth --runner builtin:fig2 --out " + truth.string()).exit_code == 0);
  const auto r = run_cli("mincov --interactions " + truth.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("covering configurations:") != std::string::npos);
}

TEST_CASE("cli: demo runs the walkthrough end to end") {
  const auto r = run_cli("demo --seed 0");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("3888 configurations") != std::string::npos);
  CHECK(r.out.find("exact 9 / 9") != std::string::npos);
  CHECK(r.out.find("minimal covering configurations") != std::string::npos);
}

TEST_CASE("cli: run with a space file equal to the builtin's space works") {
  const fs::path spacef = work_dir() / "space.txt";
  std::ofstream(spacef) << builtin_space("fig2").render();
  const auto r = run_cli("run --runner builtin:fig2 --space " + spacef.string() + " --seed 2");
  CHECK(r.exit_code == 0);
}

#endif  // COVTREE_CLI_PATH
