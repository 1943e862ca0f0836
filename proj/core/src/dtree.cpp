#include "covtree/dtree.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "rng.hpp"

namespace covtree {

namespace {

double entropy(std::size_t hits, std::size_t total) {
  if (total == 0 || hits == 0 || hits == total) return 0.0;
  const double p = static_cast<double>(hits) / static_cast<double>(total);
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

struct Sample {
  const Configuration* config;
  bool hit;
};

// Gain ratio of splitting `idx` on `option`; 0 when the option does not
// partition the subsample.
double gain_ratio(const std::vector<Sample>& samples, const std::vector<std::uint32_t>& idx,
                  std::size_t option, std::size_t domain) {
  std::vector<std::size_t> count(domain, 0), hit(domain, 0);
  std::size_t total_hits = 0;
  for (std::uint32_t i : idx) {
    const ValueIndex v = (*samples[i].config)[option];
    ++count[v];
    if (samples[i].hit) {
      ++hit[v];
      ++total_hits;
    }
  }
  std::size_t nonempty = 0;
  for (std::size_t v = 0; v < domain; ++v) {
    if (count[v]) ++nonempty;
  }
  if (nonempty < 2) return 0.0;

  const double n = static_cast<double>(idx.size());
  double remainder = 0.0;
  double split_info = 0.0;
  for (std::size_t v = 0; v < domain; ++v) {
    if (!count[v]) continue;
    const double w = static_cast<double>(count[v]) / n;
    remainder += w * entropy(hit[v], count[v]);
    split_info -= w * std::log2(w);
  }
  const double gain = entropy(total_hits, idx.size()) - remainder;
  if (gain <= 1e-12) return 0.0;  // exact zero up to rounding noise
  return gain / split_info;
}

}  // namespace

const DecisionTree::Node& DecisionTree::root() const {
  if (empty_) throw std::logic_error("empty decision tree");
  return root_;
}

bool DecisionTree::classify(const Configuration& config) const {
  const Node* node = &root();
  while (!node->is_leaf()) {
    node = &node->children.at(config[static_cast<std::size_t>(node->option)]);
  }
  return node->hit;
}

std::vector<TreePath> DecisionTree::paths() const {
  std::vector<TreePath> out;
  std::vector<Setting> settings;
  auto walk = [&](auto&& self, const Node& node) -> void {
    if (node.is_leaf()) {
      out.push_back(TreePath{settings, node.hit, node.support});
      return;
    }
    for (std::size_t v = 0; v < node.children.size(); ++v) {
      settings.push_back(Setting{static_cast<OptionIndex>(node.option),
                                 static_cast<ValueIndex>(v)});
      self(self, node.children[v]);
      settings.pop_back();
    }
  };
  walk(walk, root());
  return out;
}

std::size_t DecisionTree::leaf_count() const {
  auto walk = [](auto&& self, const Node& node) -> std::size_t {
    if (node.is_leaf()) return 1;
    std::size_t n = 0;
    for (const Node& c : node.children) n += self(self, c);
    return n;
  };
  return walk(walk, root());
}

std::string DecisionTree::dump(const ConfigSpace& space) const {
  std::string out;
  auto leaf_text = [](const Node& node) {
    return std::string(node.hit ? "HIT(" : "MISS(") + std::to_string(node.support) + ")";
  };
  if (root().is_leaf()) {
    out = leaf_text(root());
    out += '\n';
    return out;
  }
  auto walk = [&](auto&& self, const Node& node, int depth) -> void {
    const OptionDef& opt = space.option(static_cast<std::size_t>(node.option));
    for (std::size_t v = 0; v < node.children.size(); ++v) {
      out.append(static_cast<std::size_t>(depth) * 2, ' ');
      out += opt.name;
      out += '=';
      out += opt.values[v];
      out += " ->";
      const Node& child = node.children[v];
      if (child.is_leaf()) {
        out += ' ';
        out += leaf_text(child);
        out += '\n';
      } else {
        out += '\n';
        self(self, child, depth + 1);
      }
    }
  };
  walk(walk, root(), 0);
  return out;
}

DecisionTree build_tree(const std::vector<Configuration>& hits,
                        const std::vector<Configuration>& misses,
                        const ConfigSpace& space,
                        BuildDiagnostics* diagnostics) {
  if (hits.empty() && misses.empty()) {
    throw std::invalid_argument("build_tree requires at least one configuration");
  }

  // Contradictions (a config labeled both ways) are dropped to the miss side;
  // duplicates within a set are collapsed.
  std::unordered_set<Configuration, ConfigurationHash> miss_set(misses.begin(), misses.end());
  std::unordered_set<Configuration, ConfigurationHash> seen;
  std::vector<Sample> samples;
  std::vector<Configuration> storage;
  storage.reserve(hits.size() + misses.size());
  for (const Configuration& c : hits) {
    if (miss_set.contains(c)) {
      if (diagnostics) diagnostics->contradictions.push_back(c);
      continue;
    }
    if (seen.insert(c).second) storage.push_back(c);
  }
  const std::size_t hit_count = storage.size();
  for (const Configuration& c : misses) {
    if (seen.insert(c).second) storage.push_back(c);
  }
  samples.reserve(storage.size());
  for (std::size_t i = 0; i < storage.size(); ++i) {
    samples.push_back(Sample{&storage[i], i < hit_count});
  }
  if (samples.empty()) {
    throw std::invalid_argument("no configurations left after contradiction removal");
  }

  std::vector<std::uint32_t> all(samples.size());
  for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;

  auto build = [&](auto&& self, const std::vector<std::uint32_t>& idx) -> DecisionTree::Node {
    std::size_t h = 0;
    for (std::uint32_t i : idx) h += samples[i].hit;
    const std::size_t m = idx.size() - h;

    DecisionTree::Node node;
    if (m == 0 || h == 0) {
      node.hit = m == 0;
      node.support = idx.size();
      return node;
    }

    int best_option = -1;
    double best = 0.0;
    for (std::size_t o = 0; o < space.option_count(); ++o) {
      const double r = gain_ratio(samples, idx, o, space.domain_size(o));
      if (r > best) {
        best = r;
        best_option = static_cast<int>(o);
      }
    }
    if (best_option < 0) {
      // Every option has zero gain (XOR-like impurity). The sample still has
      // to be classified exactly, so split on the first option that
      // partitions it at all; only an unpartitionable sample becomes a
      // majority leaf.
      for (std::size_t o = 0; o < space.option_count() && best_option < 0; ++o) {
        ValueIndex first = (*samples[idx.front()].config)[o];
        for (std::uint32_t i : idx) {
          if ((*samples[i].config)[o] != first) {
            best_option = static_cast<int>(o);
            break;
          }
        }
      }
    }
    if (best_option < 0) {
      node.hit = h > m;  // ties -> miss
      node.support = idx.size();
      return node;
    }

    const std::size_t domain = space.domain_size(static_cast<std::size_t>(best_option));
    std::vector<std::vector<std::uint32_t>> parts(domain);
    for (std::uint32_t i : idx) {
      parts[(*samples[i].config)[static_cast<std::size_t>(best_option)]].push_back(i);
    }
    node.option = best_option;
    node.children.reserve(domain);
    for (std::size_t v = 0; v < domain; ++v) {
      if (parts[v].empty()) {
        DecisionTree::Node leaf;
        leaf.hit = h > m;  // parent majority, ties -> miss
        leaf.support = 0;
        node.children.push_back(std::move(leaf));
      } else {
        node.children.push_back(self(self, parts[v]));
      }
    }
    return node;
  };

  return DecisionTree(build(build, all));
}

double split_score(const std::vector<Configuration>& hits,
                   const std::vector<Configuration>& misses,
                   std::size_t option,
                   const ConfigSpace& space) {
  if (hits.empty() && misses.empty()) {
    throw std::invalid_argument("split_score requires a nonempty sample");
  }
  std::vector<Sample> samples;
  samples.reserve(hits.size() + misses.size());
  for (const Configuration& c : hits) samples.push_back(Sample{&c, true});
  for (const Configuration& c : misses) samples.push_back(Sample{&c, false});
  std::vector<std::uint32_t> idx(samples.size());
  for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return gain_ratio(samples, idx, option, space.domain_size(option));
}

bool test_tree(const DecisionTree& tree,
               const std::vector<Configuration>& hits,
               const std::vector<Configuration>& misses) {
  if (tree.empty()) return hits.empty() && misses.empty();
  for (const Configuration& c : hits) {
    if (!tree.classify(c)) return false;
  }
  for (const Configuration& c : misses) {
    if (tree.classify(c)) return false;
  }
  return true;
}

std::vector<TreePath> rank_paths(std::vector<TreePath> paths, std::uint64_t seed) {
  std::vector<std::size_t> order(paths.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  detail::Rng rng(seed);
  rng.shuffle(order);
  // Stable sort over a seeded shuffle: full ties land in seeded order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (paths[a].support != paths[b].support) return paths[a].support < paths[b].support;
    return paths[a].length() > paths[b].length();
  });
  std::vector<TreePath> out;
  out.reserve(paths.size());
  for (std::size_t i : order) out.push_back(std::move(paths[i]));
  return out;
}

std::vector<TreePath> rank_paths(const DecisionTree& tree, std::uint64_t seed) {
  return rank_paths(tree.paths(), seed);
}

}  // namespace covtree
