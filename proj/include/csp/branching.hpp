#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "csp/cuts.hpp"
#include "csp/node.hpp"
#include "csp/pattern.hpp"

namespace csp {

// Ordered list of size pairs that tended to close both sides quickly.
class History {
 public:
  // index in the sequence, nullopt for absent pairs
  std::optional<size_t> rank(ItemPair sizes) const;
  void both_pruned(ItemPair sizes);
  void left_open(ItemPair sizes);
  const std::vector<ItemPair>& sequence() const { return s_; }

 private:
  std::vector<ItemPair> s_;
};

struct BranchDecision {
  ItemPair pair;
  bool fallback = false;
};

ItemPair size_pair(const NodeState& node, ItemPair ids);

// Fractional-affinity pair maximising (-rank, size sum); pattern fallback when all
// affinities are integral. nullopt only for an integral primal.
std::optional<BranchDecision> select_branch(const std::vector<PrimalColumn>& primal, const AffinityMap& aff,
                                            const History* history, const NodeState& node);

bool integral(const std::vector<PrimalColumn>& primal, double tol = 1e-6);

struct SplayResult {
  std::vector<size_t> removed;  // step indices, deepest first
  std::vector<PathStep> residual;
};

// Scans the trailing run of left steps of `path` (the node that just had both children
// pruned, branching on q) from deep to shallow and selects removable steps.
SplayResult splay(const NodeState& root, std::span<const PathStep> path, ItemPair q);

bool column_valid(const NodeState& node, const Pattern& p);
bool cut_valid(const NodeState& node, const std::array<ItemId, 3>& triple);

}  // namespace csp
