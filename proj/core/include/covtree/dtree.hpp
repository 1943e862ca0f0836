#pragma once

// Exact (unpruned) multi-way decision trees over configuration options,
// trained to 100% accuracy on hit/miss configuration sets, plus path
// extraction and fragility-based path ranking.

#include <cstdint>
#include <string>
#include <vector>

#include "covtree/space.hpp"

namespace covtree {

/// One root-to-leaf path: the conjunction of edge settings, the leaf class,
/// and how many training configurations the leaf classified.
struct TreePath {
  std::vector<Setting> settings;
  bool hit = false;
  std::size_t support = 0;

  std::size_t length() const noexcept { return settings.size(); }

  friend bool operator==(const TreePath&, const TreePath&) = default;
};

class DecisionTree {
 public:
  struct Node {
    // option < 0: leaf with (hit, support). Otherwise internal; children has
    // exactly one entry per domain value of the option.
    int option = -1;
    bool hit = false;
    std::size_t support = 0;
    std::vector<Node> children;

    bool is_leaf() const noexcept { return option < 0; }
  };

  DecisionTree() = default;
  explicit DecisionTree(Node root) : root_(std::move(root)), empty_(false) {}

  bool empty() const noexcept { return empty_; }
  const Node& root() const;

  /// Follows edges by the configuration's value at each internal node.
  bool classify(const Configuration& config) const;

  /// All root-to-leaf paths in left-to-right (domain-value) order.
  std::vector<TreePath> paths() const;

  std::size_t leaf_count() const;

  /// Indented text form, one edge per line, leaves as HIT(n)/MISS(n).
  std::string dump(const ConfigSpace& space) const;

 private:
  Node root_;
  bool empty_ = true;
};

struct BuildDiagnostics {
  // Configurations present in both input sets (possible only with
  // non-deterministic coverage); they are dropped to the miss side.
  std::vector<Configuration> contradictions;
};

/// Builds an exact tree: every training configuration routes to a leaf of its
/// own label whenever the labels are separable. Splits greedily on the
/// highest gain-ratio option; ties break by option declaration order.
/// Throws std::invalid_argument when both sets are empty.
DecisionTree build_tree(const std::vector<Configuration>& hits,
                        const std::vector<Configuration>& misses,
                        const ConfigSpace& space,
                        BuildDiagnostics* diagnostics = nullptr);

/// C4.5-style gain ratio of splitting the labeled sample on `option`:
/// information gain / split information. 0 when the option does not
/// partition the sample.
double split_score(const std::vector<Configuration>& hits,
                   const std::vector<Configuration>& misses,
                   std::size_t option,
                   const ConfigSpace& space);

/// True iff the tree classifies every hit as hit and every miss as miss.
bool test_tree(const DecisionTree& tree,
               const std::vector<Configuration>& hits,
               const std::vector<Configuration>& misses);

/// Orders paths by refinement priority: ascending support, then descending
/// length, then seeded-deterministic among full ties.
std::vector<TreePath> rank_paths(std::vector<TreePath> paths, std::uint64_t seed);
std::vector<TreePath> rank_paths(const DecisionTree& tree, std::uint64_t seed);

}  // namespace covtree
