#include "csp/node.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace csp {

ItemId MergeRegistry::original_id(int64_t size) {
  if (grouped_) return size;
  return next_++;
}

ItemId MergeRegistry::merged_id(ItemPair pair, int64_t size) {
  if (grouped_) return size;
  auto it = merged_.find(pair);
  if (it != merged_.end()) return it->second;
  return merged_[pair] = next_++;
}

NodeState NodeState::root(const Instance& inst, bool grouped) {
  return root(inst, std::make_shared<MergeRegistry>(grouped));
}

NodeState NodeState::root(const Instance& inst, std::shared_ptr<MergeRegistry> registry) {
  NodeState s;
  s.W_ = inst.roll_width;
  s.total_size_ = inst.total_size();
  s.registry_ = std::move(registry);
  for (const auto& it : inst.items) {
    if (s.registry_->grouped()) {
      NodeItem ni{it.size, it.size, {}};
      ni.units.assign(it.demand, std::vector<int64_t>{it.size});
      s.items_.emplace(ni.id, std::move(ni));
    } else {
      for (int64_t c = 0; c < it.demand; ++c) {
        ItemId id = s.registry_->original_id(it.size);
        s.items_.emplace(id, NodeItem{id, it.size, {{it.size}}});
      }
    }
  }
  return s;
}

const NodeItem* NodeState::find(ItemId id) const {
  auto it = items_.find(id);
  return it == items_.end() ? nullptr : &it->second;
}

int64_t NodeState::demand(ItemId id) const {
  const NodeItem* it = find(id);
  return it ? it->demand() : 0;
}

int64_t NodeState::total_demand() const {
  int64_t s = 0;
  for (const auto& [id, it] : items_) s += it.demand();
  return s;
}

std::vector<const NodeItem*> NodeState::active_items() const {
  std::vector<const NodeItem*> out;
  for (const auto& [id, it] : items_)
    if (it.demand() > 0) out.push_back(&it);
  std::stable_sort(out.begin(), out.end(),
                   [](const NodeItem* x, const NodeItem* y) { return x->size > y->size; });
  return out;
}

bool NodeState::conflict(ItemId x, ItemId y) const { return edges_.count(ItemPair::of(x, y)) > 0; }

std::set<ItemId> NodeState::conflicts_of(ItemId id) const {
  std::set<ItemId> out;
  for (const auto& e : edges_) {
    if (e.a == id) out.insert(e.b);
    else if (e.b == id) out.insert(e.a);
  }
  return out;
}

std::pair<ItemId, int64_t> NodeState::merge_target(ItemPair pair) const {
  const NodeItem* x = find(pair.a);
  const NodeItem* y = find(pair.b);
  if (!x || !y) throw std::invalid_argument("merge_target: unknown item");
  int64_t size = x->size + y->size;
  return {registry_->merged_id(pair, size), size};
}

bool NodeState::can_merge(ItemPair pair) const {
  const NodeItem* x = find(pair.a);
  const NodeItem* y = find(pair.b);
  if (!x || !y) return false;
  if (x->size + y->size > W_) return false;
  if (pair.self() ? x->demand() < 2 : (x->demand() < 1 || y->demand() < 1)) return false;
  return !conflict(pair.a, pair.b);
}

bool NodeState::can_separate(ItemPair pair) const { return find(pair.a) && find(pair.b); }

BranchUndo NodeState::apply(ItemPair pair, Side side) {
  BranchUndo u;
  u.step = PathStep{pair, side, false};
  if (side == Side::Right) {
    if (!can_separate(pair)) throw std::invalid_argument("apply R: unknown item");
    if (edges_.insert(pair).second) u.added_edges.push_back(pair);
    path_.push_back(u.step);
    return u;
  }
  if (!can_merge(pair)) throw std::invalid_argument("apply L: precondition violated");
  auto [tid, tsize] = merge_target(pair);
  std::set<ItemId> inherited = conflicts_of(pair.a);
  for (ItemId c : conflicts_of(pair.b)) inherited.insert(c);

  NodeItem& x = items_.at(pair.a);
  u.unit_a = x.units.back();
  x.units.pop_back();
  NodeItem& y = items_.at(pair.b);
  u.unit_b = y.units.back();
  y.units.pop_back();
  std::vector<int64_t> glued = u.unit_a;
  glued.insert(glued.end(), u.unit_b.begin(), u.unit_b.end());
  std::sort(glued.begin(), glued.end(), std::greater<>());

  auto it = items_.find(tid);
  if (it == items_.end()) {
    u.created_target = true;
    it = items_.emplace(tid, NodeItem{tid, tsize, {}}).first;
  }
  it->second.units.push_back(std::move(glued));
  u.target = tid;
  for (ItemId c : inherited) {
    ItemPair e = ItemPair::of(tid, c);
    if (edges_.insert(e).second) u.added_edges.push_back(e);
  }
  path_.push_back(u.step);
  return u;
}

void NodeState::undo(const BranchUndo& u) {
  if (path_.empty() || path_.back().pair != u.step.pair || path_.back().side != u.step.side)
    throw std::logic_error("undo: record does not match the last step");
  for (const auto& e : u.added_edges) edges_.erase(e);
  if (u.step.side == Side::Left) {
    NodeItem& t = items_.at(u.target);
    t.units.pop_back();
    if (u.created_target) items_.erase(u.target);
    items_.at(u.step.pair.b).units.push_back(u.unit_b);
    items_.at(u.step.pair.a).units.push_back(u.unit_a);
  }
  path_.pop_back();
}

void NodeState::consume(const Pattern& p) {
  for (const auto& e : p.entries()) {
    auto it = items_.find(e.id);
    if (it == items_.end()) continue;
    for (int64_t c = 0; c < e.count && !it->second.units.empty(); ++c) {
      it->second.units.pop_back();
      total_size_ -= it->second.size;
    }
  }
}

bool NodeState::pattern_conflict_free(const Pattern& p) const {
  const auto& e = p.entries();
  for (size_t i = 0; i < e.size(); ++i) {
    if (e[i].count >= 2 && conflict(e[i].id, e[i].id)) return false;
    for (size_t j = i + 1; j < e.size(); ++j)
      if (conflict(e[i].id, e[j].id)) return false;
  }
  return true;
}

bool NodeState::pattern_valid(const Pattern& p) const {
  for (const auto& e : p.entries()) {
    const NodeItem* it = find(e.id);
    if (!it || it->size != e.size || it->demand() < e.count) return false;
  }
  return pattern_conflict_free(p);
}

std::optional<std::vector<std::vector<int64_t>>> NodeState::expand(
    const std::vector<Pattern>& patterns, bool require_cover) const {
  std::map<ItemId, size_t> taken;
  std::vector<std::vector<int64_t>> bins;
  for (const auto& p : patterns) {
    std::vector<int64_t> bin;
    for (const auto& e : p.entries()) {
      const NodeItem* it = find(e.id);
      if (!it) return std::nullopt;
      for (int64_t c = 0; c < e.count; ++c) {
        size_t& k = taken[e.id];
        if (k >= it->units.size()) break;
        const auto& u = it->units[k++];
        bin.insert(bin.end(), u.begin(), u.end());
      }
    }
    if (bin.empty()) continue;
    std::sort(bin.begin(), bin.end(), std::greater<>());
    bins.push_back(std::move(bin));
  }
  if (require_cover)
    for (const auto& [id, it] : items_)
      if (taken[id] < it.units.size()) return std::nullopt;
  return bins;
}

std::string NodeState::describe() const {
  std::ostringstream ss;
  ss << '{';
  bool first = true;
  for (const auto& [id, it] : items_) {
    if (it.demand() == 0) continue;
    if (!first) ss << ", ";
    first = false;
    if (!grouped()) ss << '#' << id << '=';
    ss << it.size << ':' << it.demand();
  }
  ss << '}';
  return ss.str();
}

std::optional<NodeState> replay(const NodeState& root, std::span<const PathStep> path) {
  NodeState s = root;
  for (const auto& step : path) {
    if (step.side == Side::Left ? !s.can_merge(step.pair) : !s.can_separate(step.pair))
      return std::nullopt;
    s.apply(step.pair, step.side);
    s.mutable_path().back().fixed = step.fixed;
  }
  return s;
}

std::string path_trace(std::span<const PathStep> path) {
  std::ostringstream ss;
  for (size_t i = 0; i < path.size(); ++i) {
    if (i) ss << ' ';
    const auto& s = path[i];
    ss << "v(" << s.pair.a << ',' << s.pair.b << ")-" << (s.side == Side::Left ? 'L' : 'R');
    if (s.fixed) ss << '*';
  }
  return ss.str();
}

}  // namespace csp
