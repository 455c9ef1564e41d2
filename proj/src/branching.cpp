#include "csp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csp {

std::optional<size_t> History::rank(ItemPair sizes) const {
  auto it = std::find(s_.begin(), s_.end(), sizes);
  if (it == s_.end()) return std::nullopt;
  return static_cast<size_t>(it - s_.begin());
}

void History::both_pruned(ItemPair sizes) {
  auto r = rank(sizes);
  if (!r) {
    s_.push_back(sizes);
  } else if (*r > 0) {
    std::swap(s_[*r], s_[*r - 1]);
  }
}

void History::left_open(ItemPair sizes) {
  auto r = rank(sizes);
  if (r && *r + 1 < s_.size()) std::swap(s_[*r], s_[*r + 1]);
}

ItemPair size_pair(const NodeState& node, ItemPair ids) {
  const NodeItem* a = node.find(ids.a);
  const NodeItem* b = node.find(ids.b);
  return ItemPair::of(a ? a->size : ids.a, b ? b->size : ids.b);
}

bool integral(const std::vector<PrimalColumn>& primal, double tol) {
  for (const auto& c : primal)
    if (std::abs(c.value - std::round(c.value)) > tol) return false;
  return true;
}

namespace {

bool fractional(double v) { return std::abs(v - std::round(v)) > 1e-6; }

}  // namespace

std::optional<BranchDecision> select_branch(const std::vector<PrimalColumn>& primal, const AffinityMap& aff,
                                            const History* history, const NodeState& node) {
  std::optional<ItemPair> best;
  size_t best_rank = 0;
  int64_t best_sum = 0;
  for (const auto& [pair, d] : aff) {
    if (!fractional(d) || !node.can_merge(pair)) continue;
    ItemPair sz = size_pair(node, pair);
    size_t r = std::numeric_limits<size_t>::max();
    if (history)
      if (auto k = history->rank(sz)) r = *k;
    int64_t sum = sz.a + sz.b;
    if (!best || r < best_rank || (r == best_rank && sum > best_sum)) {
      best = pair;
      best_rank = r;
      best_sum = sum;
    }
  }
  if (best) return BranchDecision{*best, false};

  // all affinities integral: split the most fractional pattern
  const PrimalColumn* pick = nullptr;
  double pick_frac = 0.0;
  bool any_fractional = false;
  for (const auto& c : primal) {
    double f = c.value - std::floor(c.value);
    if (!fractional(c.value)) continue;
    any_fractional = true;
    if (c.pattern->copies() < 2) continue;
    if (!pick || f > pick_frac) {
      pick = &c;
      pick_frac = f;
    }
  }
  if (!any_fractional) return std::nullopt;
  if (pick) {
    std::vector<std::pair<int64_t, ItemId>> copies;
    for (const auto& e : pick->pattern->entries())
      for (int64_t k = 0; k < e.count; ++k) copies.emplace_back(e.size, e.id);
    std::sort(copies.begin(), copies.end(), [](auto& x, auto& y) {
      if (x.first != y.first) return x.first > y.first;
      return x.second < y.second;
    });
    ItemPair p = ItemPair::of(copies[0].second, copies[1].second);
    if (node.can_merge(p)) return BranchDecision{p, true};
  }
  // last resort: any mergeable pair, largest size sum first
  std::optional<ItemPair> any;
  int64_t any_sum = 0;
  auto items = node.active_items();
  for (size_t x = 0; x < items.size(); ++x)
    for (size_t y = x; y < items.size(); ++y) {
      ItemPair p = ItemPair::of(items[x]->id, items[y]->id);
      int64_t sum = items[x]->size + items[y]->size;
      if (node.can_merge(p) && (!any || sum > any_sum)) {
        any = p;
        any_sum = sum;
      }
    }
  if (any) return BranchDecision{*any, true};
  return std::nullopt;
}

SplayResult splay(const NodeState& root, std::span<const PathStep> path, ItemPair q) {
  SplayResult res;
  size_t start = path.size();
  while (start > 0 && path[start - 1].side == Side::Left) --start;
  std::vector<char> drop(path.size(), 0);
  auto residual = [&] {
    std::vector<PathStep> r;
    for (size_t k = 0; k < path.size(); ++k)
      if (!drop[k]) r.push_back(path[k]);
    return r;
  };
  for (size_t k = path.size(); k-- > start;) {
    if (path[k].fixed) continue;
    drop[k] = 1;
    auto node = replay(root, residual());
    if (!node || !node->can_merge(q)) {
      drop[k] = 0;
      continue;
    }
    res.removed.push_back(k);
  }
  if (!res.removed.empty()) res.residual = residual();
  return res;
}

bool column_valid(const NodeState& node, const Pattern& p) {
  return !p.empty() && p.load() <= node.roll_width() && node.pattern_valid(p);
}

bool cut_valid(const NodeState& node, const std::array<ItemId, 3>& triple) {
  for (ItemId x : triple)
    if (node.demand(x) != 1) return false;
  return triple[0] != triple[1] && triple[1] != triple[2] && triple[0] != triple[2];
}

}  // namespace csp
