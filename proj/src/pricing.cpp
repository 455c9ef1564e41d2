#include "csp/pricing.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace csp {

namespace {

constexpr Wide kWideInf = static_cast<Wide>(1) << 120;

bool finite(int64_t v) { return v != DpTable::kInf; }

// Mutable partial pattern shared by the depth-first searches.
struct Partial {
  const PricerInput& in;
  std::vector<int> counts;
  std::vector<int> blocked;
  std::vector<int> members;
  Wide v = 0;
  int size = 0;

  explicit Partial(const PricerInput& input)
      : in(input),
        counts(input.items.size(), 0),
        blocked(input.items.size(), 0),
        members(input.cut_items.size(), 0) {}

  bool can_take(int it) const { return blocked[it] == 0; }

  Wide gain_if_taken(int it) const {
    Wide g = in.items[it].pi;
    if (counts[it] == 0)
      for (int t : in.items[it].cuts)
        if (members[t] == 1) g += in.rho[t];
    return g;
  }

  void add(int it) {
    const PricerItem& item = in.items[it];
    v += gain_if_taken(it);
    if (counts[it]++ == 0)
      for (int t : item.cuts) ++members[t];
    for (int c : item.conflicts) ++blocked[c];
    ++size;
  }

  void remove(int it) {
    const PricerItem& item = in.items[it];
    for (int c : item.conflicts) --blocked[c];
    if (--counts[it] == 0) {
      for (int t : item.cuts) {
        if (members[t] == 2) v -= in.rho[t];
        --members[t];
      }
    }
    v -= item.pi;
    --size;
  }
};

}  // namespace

PricerInput order_items(const PricingProblem& prob) {
  PricerInput in;
  in.W = prob.roll_width;
  in.K = prob.K;
  in.M = prob.M;
  in.waste_cap = prob.waste_cap;
  in.binary_mode = prob.binary_mode;
  in.zeta = prob.zeta;

  std::map<ItemId, int> index;
  std::vector<PricerItem> items;
  for (const auto& pi : prob.items) {
    if (pi.demand <= 0) continue;
    if (pi.size > prob.roll_width) continue;
    if (index.count(pi.id)) throw std::invalid_argument("order_items: duplicate id");
    index[pi.id] = static_cast<int>(items.size());
    PricerItem it;
    it.id = pi.id;
    it.size = pi.size;
    it.pi = pi.pi_int;
    it.copies = static_cast<int>(std::min<int64_t>(pi.demand, prob.roll_width / pi.size));
    items.push_back(it);
  }
  std::vector<char> self_conflict(items.size(), 0);
  std::vector<std::vector<int>> conf(items.size());
  for (const auto& e : prob.conflicts) {
    auto ia = index.find(e.a), ib = index.find(e.b);
    if (ia == index.end() || ib == index.end()) continue;
    if (e.a == e.b) {
      self_conflict[ia->second] = 1;
    } else {
      conf[ia->second].push_back(ib->second);
      conf[ib->second].push_back(ia->second);
    }
  }
  std::vector<std::array<int, 3>> cut_items;
  std::vector<int64_t> rho;
  std::vector<std::vector<int>> cuts_of(items.size());
  std::vector<char> in_neg_cut(items.size(), 0);
  for (const auto& c : prob.cuts) {
    std::array<int, 3> idx{};
    bool ok = true;
    for (int k = 0; k < 3; ++k) {
      auto f = index.find(c.items[k]);
      if (f == index.end()) {
        ok = false;
        break;
      }
      idx[k] = f->second;
    }
    if (!ok || c.rho_int == 0) continue;
    int t = static_cast<int>(cut_items.size());
    cut_items.push_back(idx);
    rho.push_back(c.rho_int);
    for (int k = 0; k < 3; ++k) {
      cuts_of[idx[k]].push_back(t);
      if (c.rho_int < 0) in_neg_cut[idx[k]] = 1;
    }
  }
  for (size_t i = 0; i < items.size(); ++i) {
    if (self_conflict[i] || prob.binary_mode) items[i].copies = std::min(items[i].copies, 1);
    items[i].part = in_neg_cut[i] ? 1 : (!conf[i].empty() ? 2 : 3);
  }

  std::vector<int> order(items.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    if (items[x].part != items[y].part) return items[x].part > items[y].part;
    if (items[x].size != items[y].size) return items[x].size > items[y].size;
    return items[x].id < items[y].id;
  });
  std::vector<int> remap(items.size());
  for (size_t k = 0; k < order.size(); ++k) remap[order[k]] = static_cast<int>(k);
  for (size_t k = 0; k < order.size(); ++k) {
    PricerItem it = items[order[k]];
    for (int c : conf[order[k]]) it.conflicts.push_back(remap[c]);
    std::sort(it.conflicts.begin(), it.conflicts.end());
    it.cuts = cuts_of[order[k]];
    in.items.push_back(std::move(it));
  }
  for (auto& c : cut_items)
    for (int& x : c) x = remap[x];
  in.cut_items = std::move(cut_items);
  in.rho = std::move(rho);

  in.next_distinct.assign(1, 0);
  for (int k = 0; k < static_cast<int>(in.items.size()); ++k) {
    int block_start = static_cast<int>(in.seq.size());
    for (int c = 0; c < in.items[k].copies; ++c) {
      in.seq.push_back(k);
      in.next_distinct.push_back(block_start);
    }
  }
  return in;
}

DpTable build_dp(const PricerInput& in) {
  const int64_t n = in.copies();
  DpTable dp(n, in.W);
  for (int64_t r = 0; r <= in.W; ++r)
    dp.at(0, r) = (!in.waste_cap || r <= *in.waste_cap) ? in.K : DpTable::kInf;
  for (int64_t i = 1; i <= n; ++i) {
    const PricerItem& it = in.items[in.seq[i - 1]];
    for (int64_t r = 0; r <= in.W; ++r) {
      int64_t best = dp(i - 1, r);
      if (it.size <= r) {
        int64_t prev = dp(i - 1, r - it.size);
        if (finite(prev)) best = finite(best) ? std::min(best, prev - it.pi) : prev - it.pi;
      }
      dp.at(i, r) = best;
    }
  }
  return dp;
}

Wide priced_reduced_cost(const PricerInput& in, const std::vector<int>& counts) {
  Wide c = in.K;
  for (size_t i = 0; i < counts.size(); ++i) c -= static_cast<Wide>(counts[i]) * in.items[i].pi;
  for (size_t t = 0; t < in.cut_items.size(); ++t) {
    int hit = 0;
    for (int x : in.cut_items[t]) hit += counts[x] > 0;
    if (hit >= 2) c -= in.rho[t];
  }
  return c;
}

Pattern to_pattern(const PricerInput& in, const PricedPattern& p) {
  std::vector<PatternEntry> e;
  for (size_t i = 0; i < p.counts.size(); ++i)
    if (p.counts[i] > 0) e.push_back({in.items[i].id, in.items[i].size, p.counts[i]});
  return Pattern(std::move(e));
}

std::vector<int> to_counts(const PricerInput& in, const Pattern& p) {
  std::vector<int> counts(in.items.size(), 0);
  for (const auto& e : p.entries()) {
    auto it = std::find_if(in.items.begin(), in.items.end(),
                           [&](const PricerItem& x) { return x.id == e.id; });
    if (it == in.items.end()) throw std::invalid_argument("to_counts: item not in pricer input");
    counts[it - in.items.begin()] = static_cast<int>(e.count);
  }
  return counts;
}

namespace {

class MultiSearch {
 public:
  MultiSearch(const PricerInput& in, const DpTable& dp)
      : in_(in), dp_(dp), p_(in), in_pool_(in.items.size(), 0), budget_(in.multi_budget()) {}

  PoolResult run() {
    rec(in_.copies(), in_.W);
    res_.calls = calls_;
    return std::move(res_);
  }

 private:
  void rec(int64_t i, int64_t r) {
    if (i == 0 || r == 0) {
      if (p_.size == 0) return;
      Wide c = static_cast<Wide>(in_.K) - p_.v;
      if (c < in_.threshold()) {
        res_.pool.push_back({p_.counts, c});
        for (size_t k = 0; k < p_.counts.size(); ++k)
          if (p_.counts[k] > 0) ++in_pool_[k];
      }
      return;
    }
    ++calls_;
    if (calls_ > budget_ && !res_.pool.empty()) {
      res_.budget_hit = true;
      return;
    }
    const int it = in_.seq[i - 1];
    const PricerItem& item = in_.items[it];
    if (item.size <= r && p_.can_take(it)) {
      p_.add(it);
      r -= item.size;
      int64_t d = dp_(i - 1, r);
      if (finite(d) && static_cast<Wide>(d) - p_.v < in_.threshold()) rec(i - 1, r);
      p_.remove(it);
      r += item.size;
      for (size_t k = 0; k < p_.counts.size(); ++k)
        if (p_.counts[k] > 0 && in_pool_[k] >= 2 * in_.zeta) return;
    }
    const int64_t ni = in_.next_distinct[i];
    int64_t d = dp_(ni, r);
    if (finite(d) && static_cast<Wide>(d) - p_.v < 0) rec(ni, r);
  }

  const PricerInput& in_;
  const DpTable& dp_;
  Partial p_;
  std::vector<int> in_pool_;
  int64_t budget_;
  int64_t calls_ = 0;
  PoolResult res_;
};

class BestSearch {
 public:
  BestSearch(const PricerInput& in, const DpTable& dp, Wide bound, int64_t budget)
      : in_(in), dp_(dp), p_(in), best_(bound), budget_(budget) {}

  std::optional<PricedPattern> run() {
    rec(in_.copies(), in_.W);
    return found_;
  }
  int64_t calls() const { return calls_; }

 private:
  void rec(int64_t i, int64_t r) {
    if (stop_) return;
    if (i == 0 || r == 0) {
      if (p_.size == 0) return;
      Wide c = static_cast<Wide>(in_.K) - p_.v;
      if (c < best_) {
        best_ = c;
        found_ = PricedPattern{p_.counts, c};
      }
      return;
    }
    ++calls_;
    if (budget_ >= 0 && calls_ > budget_) {
      stop_ = true;
      return;
    }
    const int it = in_.seq[i - 1];
    const PricerItem& item = in_.items[it];
    const int64_t ni = in_.next_distinct[i];

    bool take_ok = item.size <= r && p_.can_take(it) && finite(dp_(i - 1, r - item.size));
    Wide take_lb = kWideInf;
    if (take_ok) take_lb = static_cast<Wide>(dp_(i - 1, r - item.size)) - (p_.v + p_.gain_if_taken(it));
    Wide skip_lb = finite(dp_(ni, r)) ? static_cast<Wide>(dp_(ni, r)) - p_.v : kWideInf;

    auto take = [&] {
      if (!take_ok || take_lb >= best_) return;
      p_.add(it);
      rec(i - 1, r - item.size);
      p_.remove(it);
    };
    auto skip = [&] {
      if (skip_lb >= best_) return;
      rec(ni, r);
    };
    if (take_lb <= skip_lb) {
      take();
      skip();
    } else {
      skip();
      take();
    }
  }

  const PricerInput& in_;
  const DpTable& dp_;
  Partial p_;
  Wide best_;
  int64_t budget_;
  int64_t calls_ = 0;
  bool stop_ = false;
  std::optional<PricedPattern> found_;
};

}  // namespace

PoolResult multiple_pattern_generation(const PricerInput& in, const DpTable& dp) {
  MultiSearch s(in, dp);
  return s.run();
}

std::vector<PricedPattern> filter_pool(std::vector<PricedPattern> pool, const PricerInput& in) {
  const size_t n = in.items.size();
  std::vector<int> appear(n, 0);
  for (const auto& p : pool)
    for (size_t k = 0; k < n; ++k) appear[k] += p.counts[k] > 0;
  std::vector<char> alive(pool.size(), 1);
  for (;;) {
    int victim = -1;
    for (int q = static_cast<int>(pool.size()) - 1; q >= 0; --q) {
      if (!alive[q]) continue;
      bool over = false;
      for (size_t k = 0; k < n && !over; ++k) over = pool[q].counts[k] > 0 && appear[k] > in.zeta;
      if (!over) continue;
      // highest reduced cost goes first; among ties the later one
      if (victim < 0 || pool[q].reduced_cost > pool[victim].reduced_cost) victim = q;
    }
    if (victim < 0) break;
    alive[victim] = 0;
    for (size_t k = 0; k < n; ++k) appear[k] -= pool[victim].counts[k] > 0;
  }
  std::vector<PricedPattern> out;
  for (size_t q = 0; q < pool.size(); ++q)
    if (alive[q]) out.push_back(std::move(pool[q]));
  return out;
}

std::optional<PricedPattern> best_pattern_search(const PricerInput& in, const DpTable& dp, Wide bound,
                                                 int64_t budget, int64_t* calls) {
  BestSearch s(in, dp, bound, budget);
  auto r = s.run();
  if (calls) *calls = s.calls();
  return r;
}

std::optional<PricedPattern> best_pattern_search(const PricerInput& in, const DpTable& dp,
                                                 const std::vector<PricedPattern>& pool) {
  std::optional<PricedPattern> inc;
  for (const auto& p : pool)
    if (!inc || p.reduced_cost < inc->reduced_cost) inc = p;
  Wide bound = inc ? inc->reduced_cost : static_cast<Wide>(in.threshold());
  auto better = best_pattern_search(in, dp, bound, in.multi_budget());
  return better ? better : inc;
}

SafeBoundResult safe_bound_pricer(const PricerInput& in, const DpTable& dp, int64_t budget) {
  if (budget == -2) budget = in.safe_budget();
  struct Label {
    int parent;
    int item;
    int64_t i, r;
    Wide v;
    int size;
  };
  std::vector<Label> arena;
  using Entry = std::tuple<Wide, int64_t>;  // (lower bound, label index)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;

  SafeBoundResult res;
  Wide inc = kWideInf;
  const Wide halt = -static_cast<Wide>(in.K / 10000000000000LL);

  const int64_t n = in.copies();
  if (finite(dp(n, in.W))) {
    arena.push_back({-1, -1, n, in.W, 0, 0});
    heap.emplace(static_cast<Wide>(dp(n, in.W)), 0);
  }
  std::vector<int> counts(in.items.size(), 0);
  std::vector<int> chain;

  auto finish = [&](Wide b, bool exact) {
    res.bound = b >= kWideInf ? std::nullopt : std::optional<Wide>(b);
    res.exact = exact;
    return res;
  };

  while (!heap.empty()) {
    auto [lb, idx] = heap.top();
    if (lb >= inc) return finish(inc, true);
    Wide b = std::min(inc, lb);
    if (b >= halt) return finish(b, false);
    if (budget >= 0 && res.expansions >= budget) return finish(b, false);
    heap.pop();
    ++res.expansions;
    const Label L = arena[idx];
    if (L.i == 0 || L.r == 0) {
      if (L.size > 0) inc = std::min(inc, static_cast<Wide>(in.K) - L.v);
      continue;
    }
    const int it = in.seq[L.i - 1];
    const PricerItem& item = in.items[it];

    int64_t ni = in.next_distinct[L.i];
    if (finite(dp(ni, L.r))) {
      Wide slb = static_cast<Wide>(dp(ni, L.r)) - L.v;
      if (slb < inc) {
        arena.push_back({L.parent, L.item, ni, L.r, L.v, L.size});
        // the skip child keeps the same members, so it shares the parent chain
        heap.emplace(slb, static_cast<int64_t>(arena.size() - 1));
      }
    }
    if (item.size <= L.r && finite(dp(L.i - 1, L.r - item.size))) {
      chain.clear();
      for (int q = static_cast<int>(idx); q >= 0 && arena[q].item >= 0; q = arena[q].parent)
        chain.push_back(arena[q].item);
      bool conflict = false;
      for (int x : chain) {
        if (std::binary_search(item.conflicts.begin(), item.conflicts.end(), x)) conflict = true;
        ++counts[x];
      }
      Wide v = L.v;
      if (!conflict) {
        v += item.pi;
        if (counts[it] == 0) {
          for (int t : item.cuts) {
            int hit = 0;
            for (int y : in.cut_items[t]) hit += counts[y] > 0;
            if (hit == 1) v += in.rho[t];
          }
        }
      }
      for (int x : chain) --counts[x];
      if (!conflict) {
        Wide tlb = static_cast<Wide>(dp(L.i - 1, L.r - item.size)) - v;
        if (tlb < inc) {
          arena.push_back({static_cast<int>(idx), it, L.i - 1, L.r - item.size, v, L.size + 1});
          heap.emplace(tlb, static_cast<int64_t>(arena.size() - 1));
        }
      }
    }
  }
  return finish(inc, true);
}

}  // namespace csp
