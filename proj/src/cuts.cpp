#include "csp/cuts.hpp"

#include <algorithm>

namespace csp {

AffinityMap compute_affinities(const std::vector<PrimalColumn>& primal) {
  AffinityMap aff;
  for (const auto& col : primal) {
    if (col.value <= 0.0) continue;
    const auto& e = col.pattern->entries();
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i].count >= 2)
        aff[ItemPair{e[i].id, e[i].id}] += static_cast<double>(e[i].count * (e[i].count - 1)) / 2.0 * col.value;
      for (size_t j = i + 1; j < e.size(); ++j)
        aff[ItemPair::of(e[i].id, e[j].id)] += static_cast<double>(e[i].count * e[j].count) * col.value;
    }
  }
  return aff;
}

bool cut_hits(const Pattern& p, const std::array<ItemId, 3>& triple) {
  int hit = 0;
  for (ItemId x : triple) hit += p.count(x) > 0;
  return hit >= 2;
}

double cut_lhs(const std::vector<PrimalColumn>& primal, const std::array<ItemId, 3>& triple) {
  double s = 0.0;
  for (const auto& col : primal)
    if (col.value > 0.0 && cut_hits(*col.pattern, triple)) s += col.value;
  return s;
}

std::vector<CutCandidate> separate_sri(const std::vector<PrimalColumn>& primal, const AffinityMap& aff,
                                       const std::set<ItemId>& unit_items) {
  std::map<ItemId, std::vector<ItemId>> adj;
  auto delta = [&](ItemId x, ItemId y) {
    auto it = aff.find(ItemPair::of(x, y));
    return it == aff.end() ? 0.0 : it->second;
  };
  for (const auto& [pair, d] : aff) {
    if (pair.self() || d <= 0.0) continue;
    if (!unit_items.count(pair.a) || !unit_items.count(pair.b)) continue;
    adj[pair.a].push_back(pair.b);
    adj[pair.b].push_back(pair.a);
  }
  std::set<std::array<ItemId, 3>> seen;
  std::vector<CutCandidate> out;
  for (auto& [i, nb] : adj) {
    std::sort(nb.begin(), nb.end());
    for (size_t x = 0; x < nb.size(); ++x) {
      for (size_t y = x + 1; y < nb.size(); ++y) {
        ItemId j = nb[x], k = nb[y];
        std::array<ItemId, 3> t{i, j, k};
        std::sort(t.begin(), t.end());
        if (seen.count(t)) continue;
        double dij = delta(i, j), dik = delta(i, k), djk = delta(j, k);
        // i is adjacent to both, so at least two terms are positive already
        if (dij + dik + djk <= 1.0) continue;
        seen.insert(t);
        double v = cut_lhs(primal, t) - 1.0;
        if (v > kCutTolerance) out.push_back({t, v});
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CutCandidate& a, const CutCandidate& b) { return a.triple < b.triple; });
  return out;
}

std::vector<std::array<ItemId, 3>> select_cuts(std::vector<CutCandidate> candidates, int round, int beta,
                                               int alpha) {
  std::vector<std::array<ItemId, 3>> out;
  if (round >= alpha) return out;
  std::stable_sort(candidates.begin(), candidates.end(), [](const CutCandidate& a, const CutCandidate& b) {
    if (a.violation != b.violation) return a.violation > b.violation;
    return a.triple < b.triple;
  });
  for (size_t k = 0; k < candidates.size() && static_cast<int>(k) < beta; ++k)
    out.push_back(candidates[k].triple);
  return out;
}

}  // namespace csp
