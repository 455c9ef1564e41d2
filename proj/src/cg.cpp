#include "csp/cg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace csp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int64_t weighted_demand_of(const Rlm& rlm) {
  int64_t s = 0;
  for (const auto& it : rlm.items()) s += it.size * it.demand;
  return s;
}

std::optional<int64_t> min_cap(std::optional<int64_t> a, std::optional<int64_t> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

}  // namespace

CgStats& CgStats::operator+=(const CgStats& o) {
  lp_solves += o.lp_solves;
  fresh_solves += o.fresh_solves;
  pricing_calls += o.pricing_calls;
  generating_calls += o.generating_calls;
  columns_added += o.columns_added;
  pricing_seconds += o.pricing_seconds;
  lp_seconds += o.lp_seconds;
  return *this;
}

bool expired(const Deadline& d) { return d && Clock::now() >= *d; }

const char* to_string(CgStatus s) {
  switch (s) {
    case CgStatus::Converged: return "converged";
    case CgStatus::Pruned: return "pruned";
    case CgStatus::Stalled: return "stalled";
    case CgStatus::Halted: return "halted";
    case CgStatus::TimeLimit: return "time-limit";
  }
  return "?";
}

PricerInput make_pricer_input(const Rlm& rlm, const ScaledDuals& s, const std::vector<ItemPair>& conflicts,
                              std::optional<int64_t> waste_cap, bool binary_mode, int zeta) {
  PricingProblem prob;
  prob.roll_width = rlm.roll_width();
  prob.K = s.K;
  prob.M = s.M;
  prob.waste_cap = waste_cap;
  prob.binary_mode = binary_mode;
  prob.zeta = zeta;
  const auto& items = rlm.items();
  for (size_t i = 0; i < items.size(); ++i)
    prob.items.push_back({items[i].id, items[i].size, items[i].demand, s.pi_int[i]});
  prob.conflicts = conflicts;
  const auto& cuts = rlm.cuts();
  for (size_t t = 0; t < cuts.size(); ++t) prob.cuts.push_back({cuts[t], s.rho_int[t]});
  return order_items(prob);
}

double dual_value_gamma(double z, int64_t weighted_demand) {
  if (weighted_demand <= 0) throw std::invalid_argument("empty demand");
  return z / static_cast<double>(weighted_demand);
}

bool dual_value_update_permitted(const std::vector<double>& pi, const std::vector<RowItem>& items, double gamma) {
  for (size_t i = 0; i < items.size(); ++i)
    if (!(pi[i] < gamma * static_cast<double>(items[i].size) - 1e-9)) return false;
  return true;
}

bool binary_pricing_enabled(int64_t distinct_items, int64_t total_demand) {
  return 6 * distinct_items < 5 * total_demand;
}

std::optional<int64_t> incumbent_waste_cap(int64_t incumbent, int64_t roll_width, int64_t weighted_demand) {
  int64_t r = (incumbent - 1) * roll_width - weighted_demand;
  if (r >= roll_width) return std::nullopt;
  return r;
}

int64_t root_waste_cap(double z, int64_t roll_width, int64_t weighted_demand) {
  // a slightly larger cap only keeps more columns
  long double zw = std::floor(static_cast<long double>(z) * static_cast<long double>(roll_width) + 1e-6L);
  int64_t r = static_cast<int64_t>(zw) - weighted_demand;
  return std::max<int64_t>(r, 0);
}

int apply_waste_cap(Rlm& rlm, int64_t cap) {
  int removed = 0;
  for (int k = 0; k < rlm.num_columns(); ++k) {
    if (!rlm.column_alive(k)) continue;
    if (rlm.column(k).waste(rlm.roll_width()) > cap) {
      rlm.remove_column(k);
      ++removed;
    }
  }
  return removed;
}

bool mcrc_parks(Wide dual_objective, Wide reduced_cost, std::optional<Wide> min_reduced_cost, int64_t K,
                int64_t incumbent) {
  Wide b = min_reduced_cost && *min_reduced_cost < 0 ? *min_reduced_cost : 0;
  Wide den = static_cast<Wide>(K) - b;
  // z = dual_objective / den and the feasible reduced cost is (reduced_cost - b) / den
  return dual_objective + reduced_cost - b > static_cast<Wide>(incumbent - 1) * den;
}

std::vector<Pattern> mcrc_clean(Rlm& rlm, const ScaledDuals& s, Wide dual_objective,
                                std::optional<Wide> min_reduced_cost, int64_t incumbent,
                                const std::function<bool(const Pattern&)>& keep) {
  std::vector<Pattern> parked;
  for (int k = 0; k < rlm.num_columns(); ++k) {
    if (!rlm.column_alive(k)) continue;
    if (keep && keep(rlm.column(k))) continue;
    if (mcrc_parks(dual_objective, rlm.exact_reduced_cost(k, s), min_reduced_cost, s.K, incumbent)) {
      parked.push_back(rlm.column(k));
      rlm.remove_column(k);
    }
  }
  return parked;
}

CgOutcome run_cg(Rlm& rlm, CgOptions opts, CgStats& stats) {
  CgOutcome out;
  const int64_t weighted = weighted_demand_of(rlm);
  const std::vector<int64_t> demands = rlm.demands();
  if (rlm.penalty() < opts.penalty_start) rlm.set_penalty(opts.penalty_start);

  std::optional<int64_t> root_cap;
  bool root_rule = opts.root_waste_rule;
  bool use_dual_cols = opts.dual_value_columns && !rlm.has_extra_row() && rlm.cuts().empty();
  if (!use_dual_cols && rlm.has_dual_value_columns()) rlm.remove_dual_value_columns();
  auto cap = [&] { return min_cap(opts.waste_cap, root_cap); };
  if (opts.waste_cap) apply_waste_cap(rlm, *opts.waste_cap);

  SolveMode mode = SolveMode::Warm;
  int anomalies = 0, idle = 0;

  for (;;) {
    if (expired(opts.deadline)) {
      out.status = CgStatus::TimeLimit;
      return out;
    }
    auto t0 = Clock::now();
    LpSolution sol = rlm.solve(mode);
    stats.lp_seconds += seconds_since(t0);
    ++stats.lp_solves;
    if (mode == SolveMode::Fresh) ++stats.fresh_solves;
    if (sol.status != LpStatus::Optimal) {
      if (mode == SolveMode::Warm) {
        mode = SolveMode::Fresh;
        continue;
      }
      throw std::runtime_error(std::string("master LP failed: ") + to_string(sol.status));
    }
    mode = SolveMode::Warm;
    ++out.iterations;
    out.solution = sol;

    if (use_dual_cols) {
      if (!rlm.has_dual_value_columns()) {
        rlm.install_dual_value_columns(dual_value_gamma(sol.lp_objective, weighted));
        continue;
      }
      if (dual_value_update_permitted(sol.pi, rlm.items(), rlm.gamma()))
        rlm.install_dual_value_columns(dual_value_gamma(sol.lp_objective, weighted));
    }

    if (root_rule && sol.pure()) {
      int64_t r = root_waste_cap(sol.objective, rlm.roll_width(), weighted);
      if (!root_cap || r < *root_cap) {
        root_cap = r;
        if (apply_waste_cap(rlm, *cap()) > 0) continue;
      }
    }

    if (opts.on_iterate && opts.on_iterate(rlm, sol)) {
      out.status = CgStatus::Halted;
      out.root_cap = root_cap;
      return out;
    }

    ScaledDuals duals = scale_duals(sol.pi, demands, sol.rho, rlm.params());
    bool stalled = false;
    if (rlm.detect_dual_anomaly(duals)) {
      if (++anomalies < 2) {
        mode = SolveMode::Fresh;
        continue;
      }
      stalled = true;
    } else {
      anomalies = 0;
    }

    if (!stalled) {
      auto tp = Clock::now();
      PricerInput in = make_pricer_input(rlm, duals, opts.conflicts, cap(), opts.binary_mode, opts.zeta);
      DpTable dp = build_dp(in);
      ++stats.pricing_calls;
      std::vector<Pattern> fresh;
      if (dp(in.copies(), in.W) < in.threshold()) {
        std::vector<PricedPattern> pool;
        if (opts.multi_pattern) pool = filter_pool(multiple_pattern_generation(in, dp).pool, in);
        Wide bound = static_cast<Wide>(in.threshold());
        for (const auto& p : pool) bound = std::min(bound, p.reduced_cost);
        int64_t calls = 0;
        auto best = best_pattern_search(in, dp, bound, in.multi_budget(), &calls);
        if (!best && pool.empty() && calls >= in.multi_budget())
          best = best_pattern_search(in, dp, bound, 20 * std::max<int64_t>(in.multi_budget(), 1));
        std::unordered_set<Pattern, PatternHash> seen;
        auto push = [&](const PricedPattern& pp) {
          Pattern p = to_pattern(in, pp);
          if (!p.empty() && seen.insert(p).second) fresh.push_back(std::move(p));
        };
        if (best) push(*best);
        for (const auto& p : pool) push(p);
      }
      stats.pricing_seconds += seconds_since(tp);
      if (!fresh.empty()) {
        int added = rlm.add_columns(fresh);
        stats.columns_added += added;
        if (added > 0) {
          ++stats.generating_calls;
          idle = 0;
          continue;
        }
        if (++idle < 2) {
          mode = SolveMode::Fresh;
          continue;
        }
        stalled = true;
      }
    }

    // fully priced (or stuck): certify a bound from the current duals
    auto tp = Clock::now();
    PricerInput safe_in = make_pricer_input(rlm, duals, opts.conflicts, cap(), false, opts.zeta);
    DpTable safe_dp = build_dp(safe_in);
    SafeBoundResult sb = safe_bound_pricer(safe_in, safe_dp);
    stats.pricing_seconds += seconds_since(tp);
    out.duals = duals;
    out.dual_objective = dual_objective_int(duals, demands);
    out.min_reduced_cost = sb.bound;
    out.bound = z_safe(out.dual_objective, sb.bound, duals.K);
    out.root_cap = root_cap;

    // with the root rule in force only min(ceil, q) bounds the integer optimum
    Wide q = root_cap ? static_cast<Wide>((weighted + *root_cap) / rlm.roll_width()) + 1 : 0;
    Wide certified = root_cap ? std::min(out.bound->ceil(), q) : out.bound->ceil();
    if (opts.prune_target && certified >= *opts.prune_target) {
      out.status = CgStatus::Pruned;
      return out;
    }
    if (sol.penalty_mass > 1e-9) {
      out.used_penalty = true;
      if (rlm.penalty() * 16 <= opts.penalty_limit) {
        rlm.set_penalty(rlm.penalty() * 16);
        continue;
      }
      if (cap()) {
        opts.waste_cap.reset();
        root_cap.reset();
        root_rule = false;
        continue;
      }
      out.status = CgStatus::Stalled;
      return out;
    }
    if (root_cap) {
      if (out.bound->ceil() > q) {
        root_cap.reset();
        root_rule = false;
        out.root_cap.reset();
        continue;
      }
    }
    out.status = stalled ? CgStatus::Stalled : CgStatus::Converged;
    return out;
  }
}

}  // namespace csp
