#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "csp/instance.hpp"
#include "csp/pattern.hpp"

namespace csp {

struct ItemPair {
  ItemId a = 0;
  ItemId b = 0;  // a <= b

  static ItemPair of(ItemId x, ItemId y) { return x <= y ? ItemPair{x, y} : ItemPair{y, x}; }
  bool self() const { return a == b; }
  auto operator<=>(const ItemPair&) const = default;
};

enum class Side { Left, Right };

struct PathStep {
  ItemPair pair;
  Side side = Side::Left;
  bool fixed = false;  // set once a splay at the step's source node succeeded

  bool operator==(const PathStep&) const = default;
};

// Canonical ids for merged items. Grouped mode uses the size itself as the id,
// so only the ungrouped mode allocates.
class MergeRegistry {
 public:
  explicit MergeRegistry(bool grouped) : grouped_(grouped) {}
  bool grouped() const { return grouped_; }
  ItemId original_id(int64_t size);
  ItemId merged_id(ItemPair pair, int64_t size);

 private:
  bool grouped_;
  ItemId next_ = 0;
  std::map<ItemPair, ItemId> merged_;
};

struct NodeItem {
  ItemId id = 0;
  int64_t size = 0;
  // one entry per copy, holding the original sizes glued into it
  std::vector<std::vector<int64_t>> units;

  int64_t demand() const { return static_cast<int64_t>(units.size()); }
  bool operator==(const NodeItem&) const = default;
};

struct BranchUndo {
  PathStep step;
  ItemId target = 0;
  bool created_target = false;
  std::vector<int64_t> unit_a, unit_b;
  std::vector<ItemPair> added_edges;
};

class NodeState {
 public:
  static NodeState root(const Instance& inst, bool grouped);
  static NodeState root(const Instance& inst, std::shared_ptr<MergeRegistry> registry);

  int64_t roll_width() const { return W_; }
  bool grouped() const { return registry_->grouped(); }
  const std::map<ItemId, NodeItem>& items() const { return items_; }
  const NodeItem* find(ItemId id) const;
  int64_t demand(ItemId id) const;
  int64_t total_demand() const;
  int64_t total_size() const { return total_size_; }
  // items with positive demand, largest size first (ties by id)
  std::vector<const NodeItem*> active_items() const;

  bool conflict(ItemId x, ItemId y) const;
  std::set<ItemId> conflicts_of(ItemId id) const;
  const std::set<ItemPair>& conflict_edges() const { return edges_; }

  bool can_merge(ItemPair pair) const;
  bool can_separate(ItemPair pair) const;
  // Size and id of the item a left branch on pair would create or grow.
  std::pair<ItemId, int64_t> merge_target(ItemPair pair) const;

  BranchUndo apply(ItemPair pair, Side side);
  // Drops the copies covered by p (surplus ignored); used to build residual problems.
  void consume(const Pattern& p);
  void undo(const BranchUndo& u);

  const std::vector<PathStep>& path() const { return path_; }
  std::vector<PathStep>& mutable_path() { return path_; }
  int depth() const { return static_cast<int>(path_.size()); }

  // Fits demands and contains no conflicting pair; no capacity check here.
  bool pattern_valid(const Pattern& p) const;
  bool pattern_conflict_free(const Pattern& p) const;

  // Maps node-level patterns to bins of original sizes. Surplus copies are dropped;
  // returns nullopt if the patterns do not cover every demand.
  std::optional<std::vector<std::vector<int64_t>>> expand(const std::vector<Pattern>& patterns,
                                                          bool require_cover = true) const;

  std::shared_ptr<MergeRegistry> registry() const { return registry_; }
  std::string describe() const;

  bool operator==(const NodeState& o) const {
    return W_ == o.W_ && items_ == o.items_ && edges_ == o.edges_ && path_ == o.path_;
  }

 private:
  int64_t W_ = 0;
  int64_t total_size_ = 0;
  std::map<ItemId, NodeItem> items_;
  std::set<ItemPair> edges_;
  std::vector<PathStep> path_;
  std::shared_ptr<MergeRegistry> registry_;
};

// Replays a path from the root. Returns nullopt if some left step is not applicable.
std::optional<NodeState> replay(const NodeState& root, std::span<const PathStep> path);

std::string path_trace(std::span<const PathStep> path);

}  // namespace csp
