#include "csp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "csp/branching.hpp"
#include "csp/cg.hpp"
#include "csp/cuts.hpp"
#include "csp/master.hpp"
#include "csp/safebound.hpp"

namespace csp {

const std::vector<std::pair<std::string, bool Features::*>>& feature_table() {
  static const std::vector<std::pair<std::string, bool Features::*>> t = {
      {"multipattern", &Features::multi_pattern}, {"rf", &Features::rf},
      {"crf", &Features::crf},                    {"splay", &Features::splay},
      {"history", &Features::history},            {"small-eps", &Features::small_eps},
      {"dual-ineq", &Features::dual_ineq},        {"mcrc", &Features::mcrc},
      {"grouping", &Features::grouping},
  };
  return t;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Feasible: return "Feasible";
    case SolveStatus::InfeasibleInput: return "InfeasibleInput";
    case SolveStatus::TimeLimit: return "TimeLimit";
  }
  return "?";
}

namespace {

using Clock = std::chrono::steady_clock;

struct TimeUp {};
struct StopSearch {};

std::string path_key(std::span<const PathStep> path) {
  std::string k;
  for (const auto& s : path) {
    k += std::to_string(s.pair.a);
    k += ',';
    k += std::to_string(s.pair.b);
    k += s.side == Side::Left ? 'L' : 'R';
  }
  return k;
}

std::vector<RowItem> rows_of(const NodeState& st) {
  std::vector<RowItem> rows;
  for (const auto* it : st.active_items()) rows.push_back({it->id, it->size, it->demand()});
  return rows;
}

std::vector<ItemPair> edges_of(const NodeState& st) {
  return {st.conflict_edges().begin(), st.conflict_edges().end()};
}

enum class TaskKind { Root, Left, Right, Reprocess };

struct Parent {
  std::vector<PathStep> path;
  ItemPair pair;
  ItemPair sizes;
  bool left_pruned = false;
};

struct Task {
  TaskKind kind = TaskKind::Root;
  std::vector<PathStep> path;
  Rational inherited;
  std::shared_ptr<Parent> parent;
  std::optional<ItemPair> forced;
};

enum class Outcome { Pruned, Integral, Branched };

struct NodeResult {
  Outcome outcome = Outcome::Pruned;
  Rational bound;
  ItemPair pair;
};

class Solver {
 public:
  Solver(const Instance& inst, const SolveConfig& cfg)
      : inst_(inst), cfg_(cfg), f_(cfg.features), t0_(Clock::now()) {
    if (cfg.time_limit > 0)
      deadline_ = t0_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit));
    params_ = SafeParams::make(f_.small_eps);
    if (cfg.K) params_.K = *cfg.K;
    if (cfg.M) params_.M = *cfg.M;
    if (params_.K < params_.M) params_.M = params_.K;
    root_ = NodeState::root(inst, f_.grouping);
    W_ = inst.roll_width;
    wsum_ = root_.total_size();
  }

  SolveResult run();

 private:
  int64_t upper() const {
    int64_t u = has_inc_ ? inc_.value() : std::numeric_limits<int64_t>::max();
    if (cfg_.cutoff) u = std::min(u, *cfg_.cutoff);
    return u;
  }
  bool done() const { return has_inc_ && root_bound_ && inc_.value() <= root_bound_->ceil(); }
  void check_time() const {
    if (expired(deadline_)) throw TimeUp{};
  }

  void absorb(const Rlm& rlm);
  void offer(const NodeState& st, const std::vector<Pattern>& patterns);
  void offer_solution(Solution s);
  bool keep_for_incumbent(const Pattern& p) const;

  std::vector<std::array<ItemId, 3>> inherited_cuts(const NodeState& st) const;
  std::set<Pattern> inherited_parking(std::span<const PathStep> path) const;
  void load_columns(Rlm& rlm, const NodeState& st, std::optional<int64_t> cap, const std::set<Pattern>& skip) const;

  CgOptions base_options(const NodeState& st, std::optional<int64_t> cap);
  CgOutcome cg(Rlm& rlm, const CgOptions& o);
  Wide certified(const CgOutcome& out) const;

  NodeResult process(NodeState& st, const Task& t);
  void run_rf(const NodeState& st, const std::vector<std::array<ItemId, 3>>& cuts);
  void run_crf();
  std::optional<RelaxOutput> relax(const NodeState& residual, const std::set<Pattern>& banned, const ExtraRow* extra,
                                   const IterateFn& on_iterate, const std::vector<std::array<ItemId, 3>>& cuts);
  void remember_candidates(const NodeState& st, const RfResult& r);

  const Instance& inst_;
  SolveConfig cfg_;
  Features f_;
  Clock::time_point t0_;
  Deadline deadline_;
  SafeParams params_;
  NodeState root_;
  int64_t W_ = 0, wsum_ = 0;

  Solution inc_;
  bool has_inc_ = false;
  std::set<std::vector<int64_t>> inc_bins_;
  std::optional<Rational> root_bound_;
  double root_lp_ = 0.0;

  std::vector<Pattern> pool_;
  std::unordered_set<Pattern, PatternHash> pool_set_;
  std::map<std::string, std::vector<std::array<ItemId, 3>>> node_cuts_;
  std::set<std::array<ItemId, 3>> all_cuts_;
  std::map<std::string, std::set<Pattern>> parked_;
  std::map<std::string, Rational> node_bound_;
  History history_;
  CgStats cg_stats_;
  SolveStats stats_;

  int64_t left_since_rf_ = 0, left_since_crf_ = 0;
  std::vector<RfCandidate> candidates_;  // root-level prefixes, best first
  int crf_failures_ = 0;
};

void Solver::absorb(const Rlm& rlm) {
  for (int k = 0; k < rlm.num_columns(); ++k)
    if (pool_set_.insert(rlm.column(k)).second) pool_.push_back(rlm.column(k));
}

void Solver::offer_solution(Solution s) {
  if (has_inc_ && s.value() >= inc_.value()) return;
  std::string why;
  if (!verify_solution(inst_, s, &why)) throw std::logic_error("heuristic produced an invalid solution: " + why);
  inc_ = std::move(s);
  has_inc_ = true;
  inc_bins_.clear();
  for (const auto& b : inc_.bins) inc_bins_.insert(b);
  if (done() || (cfg_.stop_at && inc_.value() <= *cfg_.stop_at)) throw StopSearch{};
}

void Solver::offer(const NodeState& st, const std::vector<Pattern>& patterns) {
  if (has_inc_ && static_cast<int64_t>(patterns.size()) >= inc_.value()) return;
  for (const auto& p : patterns)
    if (!column_valid(st, p)) throw std::logic_error("heuristic pattern invalid at node: " + p.to_string());
  auto bins = st.expand(patterns);
  if (!bins) throw std::logic_error("heuristic solution does not cover the node");
  offer_solution(Solution{std::move(*bins)});
}

bool Solver::keep_for_incumbent(const Pattern& p) const { return inc_bins_.count(p.sizes()) > 0; }

std::vector<std::array<ItemId, 3>> Solver::inherited_cuts(const NodeState& st) const {
  std::vector<std::array<ItemId, 3>> out;
  std::set<std::array<ItemId, 3>> seen;
  const auto& path = st.path();
  for (size_t k = 0; k <= path.size(); ++k) {
    auto it = node_cuts_.find(path_key(std::span(path).first(k)));
    if (it == node_cuts_.end()) continue;
    for (const auto& t : it->second)
      if (cut_valid(st, t) && seen.insert(t).second) out.push_back(t);
  }
  return out;
}

std::set<Pattern> Solver::inherited_parking(std::span<const PathStep> path) const {
  std::set<Pattern> out;
  if (!f_.mcrc) return out;
  for (size_t k = path.size() + 1; k-- > 0;) {
    auto it = parked_.find(path_key(path.first(k)));
    if (it != parked_.end()) out.insert(it->second.begin(), it->second.end());
    if (k > 0 && path[k - 1].side == Side::Left) break;
  }
  return out;
}

void Solver::load_columns(Rlm& rlm, const NodeState& st, std::optional<int64_t> cap,
                          const std::set<Pattern>& skip) const {
  for (const auto& p : pool_) {
    if (cap && p.waste(W_) > *cap) continue;
    if (skip.count(p) || !column_valid(st, p)) continue;
    rlm.add_column(p);
  }
  for (const auto& p : bfd_patterns(st))
    if (!cap || p.waste(W_) <= *cap) rlm.add_column(p);
}

CgOptions Solver::base_options(const NodeState& st, std::optional<int64_t> cap) {
  CgOptions o;
  o.multi_pattern = f_.multi_pattern;
  o.waste_cap = cap;
  o.conflicts = edges_of(st);
  o.deadline = deadline_;
  o.prune_target = upper();
  const NodeState* sp = &st;
  o.on_iterate = [this, sp](const Rlm& rlm, const LpSolution& sol) {
    auto primal = rlm.primal(sol);
    if (auto r = rounding(primal, *sp, upper())) offer(*sp, *r);
    return false;
  };
  return o;
}

CgOutcome Solver::cg(Rlm& rlm, const CgOptions& o) {
  CgOutcome out = run_cg(rlm, o, cg_stats_);
  absorb(rlm);
  if (out.status == CgStatus::TimeLimit) throw TimeUp{};
  return out;
}

Wide Solver::certified(const CgOutcome& out) const {
  Wide c = out.bound->ceil();
  if (out.root_cap) c = std::min(c, static_cast<Wide>((wsum_ + *out.root_cap) / W_) + 1);
  return c;
}

NodeResult Solver::process(NodeState& st, const Task& t) {
  ++stats_.nodes;
  stats_.max_depth = std::max<int64_t>(stats_.max_depth, st.depth());
  NodeResult res;
  res.bound = t.inherited;
  const int64_t U = upper();
  if (t.inherited.ceil() >= U) return res;
  std::optional<int64_t> cap = incumbent_waste_cap(U, W_, wsum_);
  if (cap && *cap < 0) return res;

  const bool is_root = t.kind == TaskKind::Root;
  const std::string key = path_key(st.path());
  Rlm rlm(rows_of(st), W_, params_);
  load_columns(rlm, st, cap, inherited_parking(st.path()));

  auto emit = [&](const CgOutcome& out) {
    if (cfg_.observer && out.bound) cfg_.observer({&st, *out.bound, certified(out), U, is_root});
  };
  // returns true when the node is finished (pruned or integral)
  auto settle = [&](const CgOutcome& out) {
    if (!out.bound) return false;
    emit(out);
    Rational b(certified(out), 1);
    if (out.root_cap == std::nullopt) b = *out.bound;
    if (res.bound < b) res.bound = b;
    node_bound_[key] = res.bound;
    if (is_root) root_bound_ = res.bound;
    if (has_inc_ && done()) throw StopSearch{};
    return res.bound.ceil() >= upper();
  };

  CgOptions base = base_options(st, cap);
  CgOutcome out;
  if (is_root && f_.dual_ineq) {
    CgOptions o = base;
    o.dual_value_columns = true;
    o.binary_mode = binary_pricing_enabled(static_cast<int64_t>(rlm.items().size()), st.total_demand());
    o.root_waste_rule = true;
    out = cg(rlm, o);
    if (settle(out)) return res;
    rlm.remove_dual_value_columns();
  }
  CgOptions plain = base;
  plain.root_waste_rule = is_root;
  if (!is_root) for (const auto& c : inherited_cuts(st)) rlm.add_cut(c);

  check_time();
  out = cg(rlm, plain);
  if (settle(out)) return res;

  std::vector<PrimalColumn> primal;
  std::set<ItemId> unit;
  for (const auto* it : st.active_items())
    if (it->demand() == 1) unit.insert(it->id);
  for (int round = 0;; ++round) {
    primal = rlm.primal(out.solution);
    if (out.solution.pure() && integral(primal)) {
      std::vector<Pattern> sol;
      for (const auto& c : primal)
        for (int64_t k = 0; k < std::llround(c.value); ++k) sol.push_back(*c.pattern);
      offer(st, sol);
      if (!out.root_cap) {
        res.outcome = Outcome::Integral;
        return res;
      }
      // the capped optimum need not be optimal without the cap
      if (res.bound.ceil() >= upper()) return res;
      plain.root_waste_rule = false;
      out = cg(rlm, plain);
      if (settle(out)) return res;
      --round;
      continue;
    }
    if (is_root && round == 0) {
      stats_.integrality_ratio = integrality_ratio(primal);
      root_lp_ = out.solution.objective;
    }
    auto sel = select_cuts(separate_sri(primal, compute_affinities(primal), unit), round);
    int added = rlm.add_cuts(sel);
    if (added == 0) break;
    for (const auto& c : sel) {
      node_cuts_[key].push_back(c);
      all_cuts_.insert(c);
    }
    stats_.cuts += added;
    check_time();
    out = cg(rlm, plain);
    if (settle(out)) return res;
  }

  if (f_.mcrc && has_inc_ && !out.root_cap && out.min_reduced_cost)
    parked_[key] = [&] {
      auto v = mcrc_clean(rlm, out.duals, out.dual_objective, out.min_reduced_cost, upper(),
                          [this](const Pattern& p) { return keep_for_incumbent(p); });
      return std::set<Pattern>(v.begin(), v.end());
    }();

  if (f_.rf && (is_root || left_since_rf_ >= 10)) {
    left_since_rf_ = 0;
    run_rf(st, rlm.cuts());
  }
  if (f_.crf && stats_.rf_runs >= 2 && !candidates_.empty() &&
      left_since_crf_ >= (stats_.max_depth < 30 ? 30 : 20)) {
    left_since_crf_ = 0;
    run_crf();
  }
  if (res.bound.ceil() >= upper()) return res;

  AffinityMap aff = compute_affinities(primal);
  std::optional<BranchDecision> d;
  if (t.forced && st.can_merge(*t.forced)) d = BranchDecision{*t.forced, false};
  if (!d) d = select_branch(primal, aff, f_.history ? &history_ : nullptr, st);
  if (!d) throw std::logic_error("no branching candidate at a fractional node " + st.describe());
  res.outcome = Outcome::Branched;
  res.pair = d->pair;
  return res;
}

std::optional<RelaxOutput> Solver::relax(const NodeState& residual, const std::set<Pattern>& banned,
                                         const ExtraRow* extra, const IterateFn& on_iterate,
                                         const std::vector<std::array<ItemId, 3>>& cuts) {
  check_time();
  if (residual.total_demand() == 0) return RelaxOutput{};
  std::optional<int64_t> cap = incumbent_waste_cap(upper(), W_, wsum_);
  if (cap && *cap < 0) return std::nullopt;
  Rlm rlm(rows_of(residual), W_, params_);
  load_columns(rlm, residual, cap, banned);
  for (const auto& c : cuts)
    if (cut_valid(residual, c)) rlm.add_cut(c);
  if (extra) rlm.set_extra_row(extra->members, extra->rhs);
  CgOptions o;
  o.multi_pattern = f_.multi_pattern;
  o.waste_cap = cap;
  o.conflicts = edges_of(residual);
  o.deadline = deadline_;
  o.on_iterate = [&](const Rlm& r, const LpSolution& sol) {
    return on_iterate(r.primal(sol), sol.pure() ? sol.objective : 1e300);
  };
  CgOutcome out = cg(rlm, o);
  RelaxOutput ro;
  for (const auto& c : rlm.primal(out.solution)) ro.primal.emplace_back(*c.pattern, c.value);
  ro.objective = out.solution.objective;
  if (out.bound && out.solution.pure()) ro.bound = *out.bound;
  return ro;
}

void Solver::remember_candidates(const NodeState& st, const RfResult& r) {
  for (const auto& c : r.candidates) {
    auto bins = st.expand(c.prefix, false);
    if (!bins) continue;
    auto pats = bins_to_patterns(root_, *bins);
    if (!pats || pats->empty()) continue;
    RfCandidate rc{c.value, std::move(*pats)};
    bool dup = std::any_of(candidates_.begin(), candidates_.end(),
                           [&](const RfCandidate& x) { return x.prefix == rc.prefix; });
    if (!dup) candidates_.push_back(std::move(rc));
  }
  std::stable_sort(candidates_.begin(), candidates_.end(),
                   [](const RfCandidate& a, const RfCandidate& b) { return a.value < b.value; });
  if (candidates_.size() > 20) candidates_.resize(20);
}

void Solver::run_rf(const NodeState& st, const std::vector<std::array<ItemId, 3>>& cuts) {
  ++stats_.rf_runs;
  RelaxFn fn = [&](const NodeState& residual, const std::set<Pattern>& banned, const ExtraRow* extra,
                   const IterateFn& on_iterate) { return relax(residual, banned, extra, on_iterate, cuts); };
  RfResult r = relax_and_fix(st, upper(), fn);
  remember_candidates(st, r);
  if (r.best) offer(st, *r.best);
}

void Solver::run_crf() {
  ++stats_.crf_runs;
  const std::vector<Pattern> s_inc = candidates_.front().prefix;
  std::vector<std::array<ItemId, 3>> cuts(all_cuts_.begin(), all_cuts_.end());
  RelaxFn fn = [&](const NodeState& residual, const std::set<Pattern>& banned, const ExtraRow* extra,
                   const IterateFn& on_iterate) { return relax(residual, banned, extra, on_iterate, cuts); };
  bool improved = false;
  for (int k : {6, 12}) {
    RfParams p;
    p.extra = crf_row(s_inc, k);
    int64_t before = upper();
    RfResult r = relax_and_fix(root_, before, fn, p);
    if (r.best) {
      offer(root_, *r.best);
      improved = improved || upper() < before;
    }
  }
  if (improved) {
    crf_failures_ = 0;
  } else if (++crf_failures_ >= 10) {
    candidates_.erase(candidates_.begin());
    crf_failures_ = 0;
  }
}

SolveResult Solver::run() {
  SolveResult result;
  result.volume_bound = volume_bound(inst_);
  bool timed_out = false, stopped = false, exhausted = false;
  std::vector<Task> stack;

  try {
    offer_solution(Solution{bfd(inst_.items, W_)});
  } catch (const StopSearch&) {
    stopped = true;
  }
  if (!stopped) {
    root_bound_ = Rational(result.volume_bound, 1);
    if (done()) stopped = true;
  }

  try {
    if (!stopped) {
      for (const auto& bin : cfg_.warm_bins) {
        int64_t load = 0;
        for (int64_t s : bin) load += s;
        if (load > W_) continue;
        if (auto pats = bins_to_patterns(root_, {bin}))
          if (pool_set_.insert((*pats)[0]).second) pool_.push_back((*pats)[0]);
      }
      stack.push_back({TaskKind::Root, {}, Rational(result.volume_bound, 1), nullptr, std::nullopt});
    }
    while (!stack.empty()) {
      check_time();
      Task t = std::move(stack.back());
      stack.pop_back();
      auto st = replay(root_, t.path);
      if (!st) continue;
      if (t.kind == TaskKind::Left) {
        ++left_since_rf_;
        ++left_since_crf_;
      }
      NodeResult nr = process(*st, t);
      bool closed = nr.outcome != Outcome::Branched;

      if (t.parent && t.kind == TaskKind::Left) {
        t.parent->left_pruned = closed;
        if (!closed && f_.history) history_.left_open(t.parent->sizes);
      }
      if (t.parent && t.kind == TaskKind::Right && closed && t.parent->left_pruned) {
        if (f_.history) history_.both_pruned(t.parent->sizes);
        if (f_.splay && stats_.splays < cfg_.splay_limit) {
          SplayResult sp = splay(root_, t.parent->path, t.parent->pair);
          if (!sp.removed.empty()) {
            ++stats_.splays;
            size_t first = *std::min_element(sp.removed.begin(), sp.removed.end());
            Rational inherited = root_bound_ ? *root_bound_ : Rational(result.volume_bound, 1);
            auto it = node_bound_.find(path_key(std::span(t.parent->path).first(first)));
            if (it != node_bound_.end() && inherited < it->second) inherited = it->second;
            stack.push_back({TaskKind::Reprocess, sp.residual, inherited, nullptr, t.parent->pair});
          }
        }
      }
      if (nr.outcome == Outcome::Branched) {
        auto parent = std::make_shared<Parent>();
        parent->path = st->path();
        parent->pair = nr.pair;
        parent->sizes = size_pair(*st, nr.pair);
        bool fixed = t.kind == TaskKind::Reprocess && t.forced && *t.forced == nr.pair;
        auto child = [&](Side side) {
          std::vector<PathStep> p = st->path();
          p.push_back({nr.pair, side, fixed});
          return p;
        };
        stack.push_back({TaskKind::Right, child(Side::Right), nr.bound, parent, std::nullopt});
        stack.push_back({TaskKind::Left, child(Side::Left), nr.bound, parent, std::nullopt});
      }
    }
    exhausted = true;
  } catch (const TimeUp&) {
    timed_out = true;
  } catch (const StopSearch&) {
    stopped = true;
  }

  result.stats = stats_;
  result.stats.columns = static_cast<int64_t>(pool_.size());
  result.stats.pricing_calls = cg_stats_.pricing_calls;
  result.stats.generating_calls = cg_stats_.generating_calls;
  result.stats.lp_solves = cg_stats_.lp_solves;
  result.stats.pricing_seconds = cg_stats_.pricing_seconds;
  result.stats.lp_seconds = cg_stats_.lp_seconds;
  result.stats.total_seconds = std::chrono::duration<double>(Clock::now() - t0_).count();
  result.incumbent = inc_;
  result.value = inc_.value();
  result.root_bound = root_bound_;
  result.root_lp = root_lp_;
  for (const auto& p : pool_) {
    result.pool.push_back(p.to_string());
    if (column_valid(root_, p)) result.root_columns.push_back(p.sizes());
  }

  Rational lb = root_bound_ ? *root_bound_ : Rational(result.volume_bound, 1);
  if (done() || exhausted) {
    result.status = SolveStatus::Optimal;
    result.bound = Rational(inc_.value(), 1);
    if (cfg_.cutoff && inc_.value() >= *cfg_.cutoff) {
      result.cutoff_exhausted = true;
      if (!done()) {
        result.status = SolveStatus::Feasible;
        result.bound = lb < Rational(*cfg_.cutoff, 1) ? Rational(*cfg_.cutoff, 1) : lb;
      }
    }
  } else {
    result.status = timed_out ? SolveStatus::TimeLimit : SolveStatus::Feasible;
    result.bound = lb;
  }
  if (result.bound.ceil() > result.value) result.bound = Rational(result.value, 1);
  return result;
}

}  // namespace

SolveResult solve_csp(const Instance& inst, const SolveConfig& cfg) {
  SolveResult bad;
  if (inst.items.empty() || inst.roll_width <= 0) {
    bad.message = "empty instance";
    return bad;
  }
  for (const auto& it : inst.items)
    if (it.size <= 0 || it.size > inst.roll_width || it.demand <= 0) {
      bad.message = "item size " + std::to_string(it.size) + " invalid for W=" + std::to_string(inst.roll_width);
      return bad;
    }
  Solver s(inst, cfg);
  return s.run();
}

}  // namespace csp
