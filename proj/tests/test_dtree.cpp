#include <doctest.h>

#include <set>

#include "covtree/dtree.hpp"
#include "covtree/formula.hpp"
#include "test_util.hpp"

using namespace covtree;

namespace {

const ConfigSpace& demo_space() {
  static const ConfigSpace space = parse_space(
      "s: 0,1\nt: 0,1\nu: 0,1\nv: 0,1\n"
      "a: 0,1,2\nb: 0,1,2\nc: 0,1,2\nd: 0,1,2\ne: 0,1,2\n");
  return space;
}

Configuration cfg(std::vector<ValueIndex> v) { return Configuration(std::move(v)); }

// The three initial covering-array configurations of the demo walkthrough.
const Configuration kC1 = cfg({1, 1, 0, 0, 0, 1, 2, 1, 0});
const Configuration kC2 = cfg({0, 1, 1, 0, 2, 0, 0, 2, 2});
const Configuration kC3 = cfg({1, 0, 1, 1, 1, 2, 1, 0, 1});
// Follow-ups generated from the first tree's hit path.
const Configuration kC4 = cfg({0, 1, 1, 1, 1, 1, 0, 1, 0});
const Configuration kC5 = cfg({0, 0, 0, 0, 0, 2, 2, 0, 1});
const Configuration kC6 = cfg({0, 1, 0, 0, 2, 0, 1, 2, 2});
const Configuration kC7 = cfg({0, 1, 0, 1, 0, 0, 1, 2, 2});

const ConfigSpace& small_space() {
  static const ConfigSpace space = parse_space("s: 0,1\nt: 0,1\nz: 0,1,2,3,4");
  return space;
}

// All 20 configurations of the 3-option space, labeled by the target
// interaction s=1 & t=1 & z in {1,2,3}.
void labeled_20(std::vector<Configuration>& hits, std::vector<Configuration>& misses) {
  const Interaction target = parse_formula("s=1 & t=1 & z in {1,2,3}", small_space());
  enumerate_all(small_space(), [&](const Configuration& c) {
    (target.evaluate(c) ? hits : misses).push_back(c);
  });
}

}  // namespace

TEST_CASE("split_score: frozen gain-ratio values for the 3-config sample") {
  const std::vector<Configuration> hits{kC2};
  const std::vector<Configuration> misses{kC1, kC3};
  // H(1/3,2/3) = 0.9182958340544896 bits; the boolean s splits the sample
  // pure, so gain = split info and the ratio is 1.
  CHECK(split_score(hits, misses, 0, demo_space()) == doctest::Approx(1.0).epsilon(1e-12));
  // a takes three distinct values: gain 0.9182958..., split info log2(3).
  CHECK(split_score(hits, misses, 4, demo_space()) ==
        doctest::Approx(0.9182958340544896 / 1.584962500721156).epsilon(1e-12));
  CHECK(split_score(hits, misses, 4, demo_space()) ==
        doctest::Approx(0.5793801642856952).epsilon(1e-12));
}

TEST_CASE("split_score: option that does not partition scores 0") {
  // All three configurations share t=1.
  const std::vector<Configuration> hits{kC2};
  const std::vector<Configuration> misses{kC1, kC6};
  CHECK(split_score(hits, misses, 1, demo_space()) == 0.0);
}

TEST_CASE("build_tree reproduces the walkthrough's first tree") {
  const DecisionTree tree = build_tree({kC2}, {kC1, kC3}, demo_space());
  CHECK(tree.dump(demo_space()) == "s=0 -> HIT(1)\ns=1 -> MISS(2)\n");
  const auto paths = tree.paths();
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].hit);
  CHECK(paths[0].support == 1);
  CHECK(paths[0].settings == std::vector<Setting>{{0, 0}});
  CHECK_FALSE(paths[1].hit);
  CHECK(paths[1].support == 2);
}

TEST_CASE("build_tree: pure sample collapses to one leaf") {
  const DecisionTree tree = build_tree({kC1, kC2, kC3}, {}, demo_space());
  CHECK(tree.dump(demo_space()) == "HIT(3)\n");
  const auto paths = tree.paths();
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].settings.empty());
  CHECK(paths[0].support == 3);
}

TEST_CASE("build_tree: 20-config sample yields the ideal 3-option tree") {
  std::vector<Configuration> hits, misses;
  labeled_20(hits, misses);
  REQUIRE(hits.size() == 3);
  REQUIRE(misses.size() == 17);
  const DecisionTree tree = build_tree(hits, misses, small_space());
  CHECK(tree.dump(small_space()) ==
        "s=0 -> MISS(10)\n"
        "s=1 ->\n"
        "  t=0 -> MISS(5)\n"
        "  t=1 ->\n"
        "    z=0 -> MISS(1)\n"
        "    z=1 -> HIT(1)\n"
        "    z=2 -> HIT(1)\n"
        "    z=3 -> HIT(1)\n"
        "    z=4 -> MISS(1)\n");
  CHECK(equivalent(from_tree(tree), parse_formula("s=1 & t=1 & z in {1,2,3}", small_space()),
                   small_space()));
}

TEST_CASE("build_tree throws when both sets are empty") {
  CHECK_THROWS_AS(build_tree({}, {}, demo_space()), std::invalid_argument);
}

TEST_CASE("contradictory configurations drop to the miss side with a warning") {
  BuildDiagnostics diag;
  const DecisionTree tree = build_tree({kC1, kC2}, {kC1, kC3}, demo_space(), &diag);
  REQUIRE(diag.contradictions.size() == 1);
  CHECK(diag.contradictions[0] == kC1);
  CHECK_FALSE(tree.classify(kC1));
  CHECK(tree.classify(kC2));
}

TEST_CASE("classify follows edges by option values") {
  const DecisionTree tree = build_tree({kC2}, {kC1, kC3}, demo_space());
  CHECK(tree.classify(kC2));
  // c4 has s=0, so the first tree calls it a hit; its real coverage later
  // exposes this as a counterexample.
  CHECK(tree.classify(kC4));
  const DecisionTree one_leaf = build_tree({kC1}, {}, demo_space());
  CHECK(one_leaf.classify(kC3));
}

TEST_CASE("test_tree") {
  const DecisionTree tree = build_tree({kC2}, {kC1, kC3}, demo_space());
  SUBCASE("fails on counterexamples") {
    CHECK_FALSE(test_tree(tree, {kC2, kC7}, {kC1, kC3, kC4, kC5, kC6}));
  }
  SUBCASE("passes its own training sets") {
    CHECK(test_tree(tree, {kC2}, {kC1, kC3}));
  }
  SUBCASE("vacuously true on empty sets") {
    CHECK(test_tree(tree, {}, {}));
  }
}

TEST_CASE("rank_paths: support ascending, then length descending") {
  // The five-path ranking scenario: c and d are interchangeable, then e, a, b.
  auto path = [](std::string label, std::size_t support, std::size_t len) {
    TreePath p;
    p.support = support;
    p.hit = false;
    for (std::size_t i = 0; i < len; ++i) {
      p.settings.push_back(Setting{static_cast<OptionIndex>(i), static_cast<ValueIndex>(0)});
    }
    // stash the label in the last setting's value for identification
    p.settings.back().value = static_cast<ValueIndex>(label[0]);
    return p;
  };
  const TreePath a = path("a", 2, 2), b = path("b", 2, 1), c = path("c", 1, 3),
                 d = path("d", 1, 3), e = path("e", 2, 3);
  for (std::uint64_t seed : {0ull, 1ull, 42ull}) {
    const auto ranked = rank_paths({a, b, c, d, e}, seed);
    REQUIRE(ranked.size() == 5);
    auto label = [](const TreePath& p) { return static_cast<char>(p.settings.back().value); };
    const std::set<char> first_two{label(ranked[0]), label(ranked[1])};
    CHECK(first_two == std::set<char>{'c', 'd'});
    CHECK(label(ranked[2]) == 'e');
    CHECK(label(ranked[3]) == 'a');
    CHECK(label(ranked[4]) == 'b');
    CHECK(rank_paths({a, b, c, d, e}, seed) == ranked);  // deterministic per seed
  }
}

TEST_CASE("rank_paths: longest path wins at equal support") {
  TreePath short_p, long_p;
  short_p.support = long_p.support = 3;
  for (int i = 0; i < 2; ++i) short_p.settings.push_back({static_cast<OptionIndex>(i), 0});
  for (int i = 0; i < 4; ++i) long_p.settings.push_back({static_cast<OptionIndex>(i), 0});
  const auto ranked = rank_paths({short_p, long_p}, 9);
  CHECK(ranked[0].length() == 4);
  CHECK(ranked[1].length() == 2);
}

TEST_CASE("rank_paths: single-path tree returns that path") {
  const DecisionTree tree = build_tree({kC1}, {}, demo_space());
  const auto ranked = rank_paths(tree, 123);
  REQUIRE(ranked.size() == 1);
  CHECK(ranked[0].hit);
}

TEST_CASE("build_tree properties on random separable samples") {
  testutil::Rng rng(808);
  for (int iter = 0; iter < 300; ++iter) {
    const ConfigSpace space = testutil::random_space(rng, 2, 5, 4);
    const Interaction label = testutil::random_formula(rng, space);
    std::vector<Configuration> hits, misses;
    std::set<Configuration> seen;
    const std::size_t n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) {
      Configuration c = testutil::random_config(rng, space);
      if (!seen.insert(c).second) continue;
      (label.evaluate(c) ? hits : misses).push_back(std::move(c));
    }
    if (hits.empty() && misses.empty()) continue;
    const DecisionTree tree = build_tree(hits, misses, space);

    // 100% training accuracy
    CHECK(test_tree(tree, hits, misses));

    // leaf supports sum to the sample size
    std::size_t support = 0;
    for (const TreePath& p : tree.paths()) {
      support += p.support;
      // no option repeats along a path
      std::set<OptionIndex> opts;
      for (const Setting& s : p.settings) CHECK(opts.insert(s.option).second);
    }
    CHECK(support == hits.size() + misses.size());

    // the hit-path disjunction is satisfied by every hit and no miss
    const Interaction f = from_tree(tree);
    for (const Configuration& c : hits) CHECK(f.evaluate(c));
    for (const Configuration& c : misses) CHECK_FALSE(f.evaluate(c));

    // determinism: same input, same structure
    CHECK(build_tree(hits, misses, space).dump(space) == tree.dump(space));
  }
}
