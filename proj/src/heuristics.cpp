#include "csp/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace csp {

bool verify_solution(const Instance& inst, const Solution& sol, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return false;
  };
  std::map<int64_t, int64_t> need;
  for (const auto& it : inst.items) need[it.size] += it.demand;
  for (const auto& bin : sol.bins) {
    int64_t load = 0;
    if (bin.empty()) return fail("empty bin");
    for (int64_t s : bin) {
      load += s;
      auto f = need.find(s);
      if (f == need.end()) return fail("unknown size " + std::to_string(s));
      if (--f->second < 0) return fail("size " + std::to_string(s) + " packed too often");
    }
    if (load > inst.roll_width) return fail("bin load " + std::to_string(load) + " exceeds W");
  }
  for (const auto& [s, left] : need)
    if (left != 0) return fail("size " + std::to_string(s) + " not covered");
  return true;
}

std::vector<std::vector<int64_t>> bfd(const std::vector<Item>& items, int64_t roll_width) {
  std::vector<int64_t> copies;
  for (const auto& it : items)
    for (int64_t c = 0; c < it.demand; ++c) copies.push_back(it.size);
  std::stable_sort(copies.begin(), copies.end(), std::greater<>());
  std::vector<std::vector<int64_t>> bins;
  std::vector<int64_t> load;
  for (int64_t s : copies) {
    int best = -1;
    for (size_t b = 0; b < bins.size(); ++b)
      if (load[b] + s <= roll_width && (best < 0 || load[b] > load[best])) best = static_cast<int>(b);
    if (best < 0) {
      bins.emplace_back();
      load.push_back(0);
      best = static_cast<int>(bins.size()) - 1;
    }
    bins[best].push_back(s);
    load[best] += s;
  }
  return bins;
}

namespace {

// BFD over explicit copies (id, size) under the node's conflicts.
std::vector<Pattern> bfd_copies(const NodeState& node, const std::vector<std::pair<ItemId, int64_t>>& copies) {
  std::vector<std::map<ItemId, int64_t>> bins;
  std::vector<int64_t> load;
  auto compatible = [&](const std::map<ItemId, int64_t>& bin, ItemId id) {
    for (const auto& [other, c] : bin)
      if (node.conflict(id, other) && (other != id || c >= 1)) return false;
    return true;
  };
  for (auto [id, size] : copies) {
    int best = -1;
    for (size_t b = 0; b < bins.size(); ++b)
      if (load[b] + size <= node.roll_width() && compatible(bins[b], id) && (best < 0 || load[b] > load[best]))
        best = static_cast<int>(b);
    if (best < 0) {
      bins.emplace_back();
      load.push_back(0);
      best = static_cast<int>(bins.size()) - 1;
    }
    ++bins[best][id];
    load[best] += size;
  }
  std::vector<Pattern> out;
  for (const auto& bin : bins) {
    std::vector<PatternEntry> e;
    for (const auto& [id, c] : bin) e.push_back({id, node.find(id)->size, c});
    out.emplace_back(std::move(e));
  }
  return out;
}

std::vector<std::pair<ItemId, int64_t>> sorted_copies(const NodeState& node,
                                                      const std::map<ItemId, int64_t>& demand) {
  std::vector<std::pair<ItemId, int64_t>> copies;
  for (const auto& [id, d] : demand)
    for (int64_t c = 0; c < d; ++c) copies.emplace_back(id, node.find(id)->size);
  std::stable_sort(copies.begin(), copies.end(), [](auto& x, auto& y) { return x.second > y.second; });
  return copies;
}

std::map<ItemId, int64_t> demand_map(const NodeState& node) {
  std::map<ItemId, int64_t> d;
  for (const auto* it : node.active_items()) d[it->id] = it->demand();
  return d;
}

}  // namespace

std::vector<Pattern> bfd_patterns(const NodeState& node) { return bfd_copies(node, sorted_copies(node, demand_map(node))); }

int64_t rounding_budget(int64_t incumbent, int64_t roll_width, int64_t weighted_demand) {
  return (incumbent - 1) * roll_width - weighted_demand;
}

std::optional<std::vector<Pattern>> rounding(const std::vector<PrimalColumn>& primal, const NodeState& node,
                                             int64_t incumbent, double lambda_min) {
  const int64_t W = node.roll_width();
  int64_t budget = rounding_budget(incumbent, W, node.total_size());
  if (budget < 0) return std::nullopt;

  struct Cand {
    const Pattern* p;
    double v;
  };
  std::vector<Cand> cands;
  for (const auto& c : primal) {
    if (c.value <= 0.0) continue;
    double whole = std::floor(c.value + 1e-9);
    for (int64_t k = 0; k < static_cast<int64_t>(whole); ++k) cands.push_back({c.pattern, 1.0});
    double frac = c.value - whole;
    if (frac > 1e-9) cands.push_back({c.pattern, frac});
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });

  std::map<ItemId, int64_t> left = demand_map(node);
  std::vector<Pattern> chosen;
  for (const auto& c : cands) {
    if (c.v < lambda_min) break;
    if (!node.pattern_conflict_free(*c.p)) continue;
    int64_t waste = c.p->waste(W);
    for (const auto& e : c.p->entries()) {
      int64_t have = left.count(e.id) ? left[e.id] : 0;
      if (e.count > have) waste += (e.count - have) * e.size;
    }
    if (waste > budget) continue;
    budget -= waste;
    for (const auto& e : c.p->entries()) {
      auto f = left.find(e.id);
      if (f != left.end()) f->second = std::max<int64_t>(0, f->second - e.count);
    }
    chosen.push_back(*c.p);
  }
  for (auto it = left.begin(); it != left.end();) it = it->second == 0 ? left.erase(it) : std::next(it);
  auto rest = bfd_copies(node, sorted_copies(node, left));
  chosen.insert(chosen.end(), rest.begin(), rest.end());
  if (static_cast<int64_t>(chosen.size()) >= incumbent) return std::nullopt;
  return chosen;
}

double integrality_ratio(const std::vector<PrimalColumn>& primal) {
  double z = 0.0, whole = 0.0;
  for (const auto& c : primal) {
    if (c.value <= 0.0) continue;
    z += c.value;
    if (std::abs(c.value - std::round(c.value)) <= 1e-9) whole += c.value;
  }
  return z > 0.0 ? whole / z : 0.0;
}

double rf_gap(int64_t incumbent, double bound) { return static_cast<double>(incumbent) - bound - 1.0; }

ExtraRow crf_row(const std::vector<Pattern>& s_inc, int k) {
  ExtraRow row;
  std::set<Pattern> seen;
  for (const auto& p : s_inc)
    if (seen.insert(p).second) row.members.push_back(p);
  row.rhs = static_cast<double>(static_cast<int64_t>(s_inc.size()) - k);
  return row;
}

namespace {

std::vector<Pattern> flatten(const std::vector<std::vector<Pattern>>& sets) {
  std::vector<Pattern> out;
  for (const auto& f : sets) out.insert(out.end(), f.begin(), f.end());
  return out;
}

// ids whose coverage by `fixed` exceeds the residual demand
std::set<ItemId> over_covered(const NodeState& residual, const std::vector<Pattern>& fixed) {
  std::map<ItemId, int64_t> cover;
  for (const auto& p : fixed)
    for (const auto& e : p.entries()) cover[e.id] += e.count;
  std::set<ItemId> out;
  for (const auto& [id, c] : cover)
    if (c > residual.demand(id)) out.insert(id);
  return out;
}

}  // namespace

RfResult relax_and_fix(const NodeState& node, int64_t incumbent, const RelaxFn& relax, const RfParams& params) {
  RfResult res;
  int64_t inc = incumbent;
  std::set<Pattern> banned;
  std::vector<std::vector<Pattern>> start;

  auto record = [&](std::vector<Pattern> sol) {
    if (static_cast<int64_t>(sol.size()) < inc) {
      inc = static_cast<int64_t>(sol.size());
      res.best = std::move(sol);
    }
  };

  for (int run = 0; run < params.runs; ++run) {
    std::vector<std::vector<Pattern>> S = start;
    std::optional<int64_t> completed;
    std::vector<Pattern> completed_prefix;
    for (;;) {
      NodeState residual = node;
      std::vector<Pattern> fixed = flatten(S);
      for (const auto& p : fixed) residual.consume(p);
      const int64_t nfixed = static_cast<int64_t>(fixed.size());
      if (residual.total_demand() == 0) {
        if (!completed || nfixed < *completed) {
          completed = nfixed;
          completed_prefix = fixed;
        }
        record(fixed);
        break;
      }

      std::optional<ExtraRow> extra;
      if (params.extra) {
        ExtraRow r;
        double rhs = params.extra->rhs;
        for (const auto& p : params.extra->members) {
          rhs -= static_cast<double>(std::count(fixed.begin(), fixed.end(), p));
          if (residual.pattern_valid(p)) r.members.push_back(p);
        }
        r.rhs = std::max(0.0, rhs);
        if (!r.members.empty() && r.rhs > 0.0) extra = std::move(r);
      }

      IterateFn on_iterate = [&](const std::vector<PrimalColumn>& primal, double objective) {
        if (auto r = rounding(primal, residual, inc - nfixed, params.lambda_min)) {
          std::vector<Pattern> sol = fixed;
          sol.insert(sol.end(), r->begin(), r->end());
          if (!completed || static_cast<int64_t>(sol.size()) < *completed) {
            completed = static_cast<int64_t>(sol.size());
            completed_prefix = fixed;
          }
          record(std::move(sol));
        }
        return objective + static_cast<double>(nfixed) <= static_cast<double>(inc - 1) + 1e-9;
      };
      auto out = relax(residual, banned, extra ? &*extra : nullptr, on_iterate);
      ++res.relaxations;
      if (!out) break;

      double g = rf_gap(inc, static_cast<double>(nfixed) + (out->bound ? out->bound->to_double() : out->objective));
      std::vector<std::pair<Pattern, double>> cols;
      for (const auto& [p, v] : out->primal)
        if (v > 1e-9 && !banned.count(p)) cols.emplace_back(p, v);
      std::stable_sort(cols.begin(), cols.end(), [](auto& a, auto& b) { return a.second > b.second; });

      std::vector<Pattern> F;
      for (const auto& [p, v] : cols) {
        if (v < 1.0 - 1e-9) continue;
        for (int64_t k = 0; k < static_cast<int64_t>(std::floor(v + 1e-9)); ++k) F.push_back(p);
      }
      if (F.empty() && !cols.empty()) {
        F.push_back(cols[0].first);
        g -= 1.0 - cols[0].second;
        for (size_t k = 1; k < cols.size(); ++k) {
          const auto& [p, v] = cols[k];
          if (v <= 0.5 || 1.0 - v > g) continue;
          std::set<ItemId> before = over_covered(residual, F);
          std::vector<Pattern> trial = F;
          trial.push_back(p);
          std::set<ItemId> after = over_covered(residual, trial);
          if (!std::includes(before.begin(), before.end(), after.begin(), after.end())) continue;
          F = std::move(trial);
          g -= 1.0 - v;
        }
      }
      if (F.empty()) break;
      S.push_back(std::move(F));
    }
    if (completed) res.candidates.push_back({*completed, completed_prefix});

    // next run drops the last quarter of the fixed sets and bans their patterns
    size_t drop = std::max<size_t>(1, S.size() / 4);
    if (S.size() < drop) break;
    for (size_t k = S.size() - drop; k < S.size(); ++k)
      for (const auto& p : S[k]) banned.insert(p);
    S.resize(S.size() - drop);
    start = std::move(S);
  }
  std::stable_sort(res.candidates.begin(), res.candidates.end(),
                   [](const RfCandidate& a, const RfCandidate& b) { return a.value < b.value; });
  return res;
}

std::optional<std::vector<Pattern>> bins_to_patterns(const NodeState& root,
                                                    const std::vector<std::vector<int64_t>>& bins) {
  std::map<int64_t, std::vector<ItemId>> free_ids;
  for (const auto* it : root.active_items())
    for (int64_t c = 0; c < it->demand(); ++c) free_ids[it->size].push_back(it->id);
  for (auto& [s, ids] : free_ids) std::reverse(ids.begin(), ids.end());
  std::vector<Pattern> out;
  for (const auto& bin : bins) {
    std::map<ItemId, int64_t> counts;
    for (int64_t s : bin) {
      auto& ids = free_ids[s];
      if (ids.empty()) return std::nullopt;
      ++counts[ids.back()];
      ids.pop_back();
    }
    std::vector<PatternEntry> e;
    for (const auto& [id, c] : counts) e.push_back({id, root.find(id)->size, c});
    out.emplace_back(std::move(e));
  }
  return out;
}

}  // namespace csp
