#include <doctest.h>

#include <algorithm>

#include "covtree/analysis.hpp"
#include "test_util.hpp"

using namespace covtree;

namespace {

const ConfigSpace& fig2() { return builtin_space("fig2"); }

const GroundTruth& fig2_truth() {
  static const GroundTruth truth = ground_truth(fig2(), Runner::builtin("fig2"));
  return truth;
}

}  // namespace

TEST_CASE("ground_truth characterizes every demo location exactly") {
  const GroundTruth& truth = fig2_truth();
  REQUIRE(truth.interactions.size() == 9);
  CHECK(truth.space_size == 3888);
  const auto expected = testutil::demo_expected(fig2());
  for (const auto& [loc, f] : expected) {
    REQUIRE(truth.interactions.contains(loc));
    CHECK(equivalent(truth.interactions.at(loc), f, fig2()));
  }
  CHECK(truth.interactions.at("L0").is_true());
  // covering tables agree with the formulas on every configuration
  for (const auto& [loc, table] : truth.covering) {
    std::size_t count = 0;
    enumerate_all(fig2(), [&](const Configuration& c) {
      CHECK(table[config_rank(fig2(), c)] == truth.interactions.at(loc).evaluate(c));
      ++count;
    });
    CHECK(count == truth.space_size);
  }
}

TEST_CASE("ground_truth refuses spaces above the cap") {
  CHECK_THROWS_AS(ground_truth(fig2(), Runner::builtin("fig2"), 100), std::invalid_argument);
}

TEST_CASE("compare: counts equivalent locations and coverage delta") {
  const GroundTruth& truth = fig2_truth();
  SUBCASE("truth against itself is fully exact") {
    const CompareResult cmp = compare(truth.interactions, truth, fig2());
    CHECK(cmp.exact == cmp.total);
    CHECK(cmp.total == 9);
    CHECK(cmp.delta_cov == 0);
    CHECK(cmp.inexact.empty());
  }
  SUBCASE("one wrong formula costs one exact point") {
    auto inferred = truth.interactions;
    inferred.insert_or_assign("L8", parse_formula("s=0", fig2()));
    const CompareResult cmp = compare(inferred, truth, fig2());
    CHECK(cmp.exact == 8);
    CHECK(cmp.total == 9);
    CHECK(cmp.inexact == std::vector<std::string>{"L8"});
  }
  SUBCASE("missing locations count in delta_cov") {
    auto inferred = truth.interactions;
    inferred.erase("L2");
    const CompareResult cmp = compare(inferred, truth, fig2());
    CHECK(cmp.exact == 8);
    CHECK(cmp.delta_cov == -1);
  }
}

TEST_CASE("random_baseline: one configuration makes every covered location true") {
  const auto inferred = random_baseline(fig2(), Runner::builtin("fig2"), 1, 3);
  CHECK(!inferred.empty());
  for (const auto& [loc, f] : inferred) CHECK(f.is_true());
}

TEST_CASE("random_baseline: the full space reproduces ground-truth semantics") {
  const ConfigSpace& space = builtin_space("c50limit");
  const Runner runner = Runner::builtin("c50limit");
  const auto inferred = random_baseline(space, runner, 20, 9);
  const GroundTruth truth = ground_truth(space, runner);
  REQUIRE(inferred.size() == truth.interactions.size());
  for (const auto& [loc, f] : truth.interactions) {
    CHECK(equivalent(inferred.at(loc), f, space));
  }
  CHECK(equivalent(inferred.at("HIT"), parse_formula("s=1 & t=1 & z in {1,2,3}", space), space));
}

TEST_CASE("min_covering_configs: a single true interaction needs one config") {
  const auto cover = min_covering_configs({{"P", Interaction::make_true()}}, fig2());
  CHECK(cover.configs.size() == 1);
  CHECK(cover.unsatisfiable.empty());
}

TEST_CASE("min_covering_configs: mutually exclusive interactions need two configs") {
  const std::map<std::string, Interaction> interactions{
      {"A", parse_formula("u=1 & v=1", fig2())},
      {"B", parse_formula("u=0", fig2())},
  };
  const auto cover = min_covering_configs(interactions, fig2());
  REQUIRE(cover.configs.size() == 2);
  for (const auto& [loc, f] : interactions) {
    CHECK(std::any_of(cover.configs.begin(), cover.configs.end(),
                      [&](const Configuration& c) { return f.evaluate(c); }));
  }
}

TEST_CASE("min_covering_configs: unsatisfiable interactions are reported, not covered") {
  const std::map<std::string, Interaction> interactions{
      {"A", Interaction::make_true()},
      {"DEAD", Interaction::make_false()},
  };
  const auto cover = min_covering_configs(interactions, fig2());
  CHECK(cover.configs.size() == 1);
  CHECK(cover.unsatisfiable == std::vector<std::string>{"DEAD"});
}

TEST_CASE("min_covering_configs: demo truth is covered by a handful of configs") {
  const auto cover = min_covering_configs(fig2_truth().interactions, fig2());
  CHECK(cover.unsatisfiable.empty());
  CHECK(cover.configs.size() <= 6);
  for (const auto& [loc, f] : fig2_truth().interactions) {
    CHECK(std::any_of(cover.configs.begin(), cover.configs.end(),
                      [&](const Configuration& c) { return f.evaluate(c); }));
  }
}

TEST_CASE("make_report: distinct-form counts computed from the demo annotations") {
  // Independent oracle: classify the nine expected formulas directly.
  const auto expected = testutil::demo_expected(fig2());
  std::size_t single = 0, conj = 0, disj = 0, mixed = 0;
  std::vector<std::size_t> lengths;
  for (const auto& [loc, f] : expected) {
    const Interaction canon = canonicalize(f, fig2()).formula;
    switch (classify_form(canon)) {
      case FormClass::Single: ++single; break;
      case FormClass::Conj: ++conj; break;
      case FormClass::Disj: ++disj; break;
      case FormClass::Mixed: ++mixed; break;
    }
    lengths.push_back(length(canon));
  }
  CHECK(single == 1);  // the always-covered location
  CHECK(conj == 1);
  CHECK(disj == 2);
  CHECK(mixed == 5);
  CHECK(*std::max_element(lengths.begin(), lengths.end()) == 4);

  // A perfect engine run must report the same counters.
  EngineParams params;
  params.seed = 1;
  const EngineResult result = run_engine(fig2(), Runner::builtin("fig2"), params);
  const RunReport report = make_report(fig2(), result, &fig2_truth());
  CHECK(report.locations == 9);
  CHECK(report.interactions_total == 9);
  CHECK(report.single == single);
  CHECK(report.conj == conj);
  CHECK(report.disj == disj);
  CHECK(report.mixed == mixed);
  CHECK(report.max_length == 4);
  CHECK(report.exact == 9);
  CHECK(report.truth_total == 9);
  CHECK(report.delta_cov == 0);
  REQUIRE(!report.convergence.empty());
  CHECK(report.convergence.back().second == 9);
  CHECK(report.convergence.back().first == result.executions);
}

TEST_CASE("make_report: empty run reports zero counters") {
  EngineResult empty;
  const RunReport report = make_report(fig2(), empty, nullptr);
  CHECK(report.configs == 0);
  CHECK(report.locations == 0);
  CHECK(report.interactions_total == 0);
  CHECK(report.max_length == 0);
}

TEST_CASE("discovery_stats: the always-covered location settles immediately") {
  EngineParams params;
  params.seed = 1;
  const EngineResult result = run_engine(fig2(), Runner::builtin("fig2"), params);
  const auto stats = discovery_stats(fig2(), result);
  CHECK(stats.at("L0").iteration_found == 1);
  CHECK(stats.at("L0").configs_at_found == 3);
}

TEST_CASE("result_json round-trips through load_result_json") {
  EngineParams params;
  params.seed = 5;
  const EngineResult result = run_engine(fig2(), Runner::builtin("fig2"), params);
  const RunReport report = make_report(fig2(), result, nullptr);
  const std::string text = result_json(fig2(), "builtin:fig2", params, result, report, 12);
  const LoadedResult loaded = load_result_json(text);
  CHECK(loaded.fingerprint == fig2().fingerprint());
  CHECK(loaded.space == fig2());
  REQUIRE(loaded.interactions.size() == result.interactions.size());
  for (const auto& [loc, f] : result.interactions) {
    CHECK(render_formula(loaded.interactions.at(loc), fig2()) == render_formula(f, fig2()));
  }
}

TEST_CASE("load_result_json rejects malformed documents") {
  CHECK_THROWS_AS(load_result_json("not json"), ParseError);
  CHECK_THROWS_AS(load_result_json("{\"schema\": \"covtree-result-v1\"}"), ParseError);
}

TEST_CASE("iteration_csv and convergence_csv have the documented shapes") {
  EngineParams params;
  params.seed = 1;
  const EngineResult result = run_engine(fig2(), Runner::builtin("fig2"), params);
  const std::string csv = iteration_csv(fig2(), result, &fig2_truth());
  CHECK(csv.rfind("iteration,explore,configs,rebuilt,exact,total\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(result.log.size()));

  const RunReport report = make_report(fig2(), result, &fig2_truth());
  const std::string conv = convergence_csv(report);
  CHECK(conv.rfind("configs,exact,total\n", 0) == 0);
  CHECK(conv.find(",9\n") != std::string::npos);
}

TEST_CASE("report_table lists the documented columns") {
  EngineParams params;
  params.seed = 1;
  const EngineResult result = run_engine(fig2(), Runner::builtin("fig2"), params);
  const RunReport report = make_report(fig2(), result, &fig2_truth());
  const std::string table = report_table(report);
  for (const char* needle : {"configs", "cov", "single", "conj", "disj", "mix", "total",
                             "len max", "len median", "exact", "delta cov"}) {
    CHECK(table.find(needle) != std::string::npos);
  }
}
