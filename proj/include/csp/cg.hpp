#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "csp/master.hpp"
#include "csp/node.hpp"
#include "csp/pricing.hpp"

namespace csp {

struct CgStats {
  int64_t lp_solves = 0;
  int64_t fresh_solves = 0;
  int64_t pricing_calls = 0;
  int64_t generating_calls = 0;
  int64_t columns_added = 0;
  double pricing_seconds = 0.0;
  double lp_seconds = 0.0;

  CgStats& operator+=(const CgStats& o);
};

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

bool expired(const Deadline& d);

struct CgOptions {
  bool multi_pattern = true;
  bool binary_mode = false;
  int zeta = 3;
  std::optional<int64_t> waste_cap;  // subtree rule, from the incumbent
  bool root_waste_rule = false;      // cap from intermediate objective values
  bool dual_value_columns = false;
  std::vector<ItemPair> conflicts;
  Deadline deadline;
  // stop early once the ceiling of the safe bound reaches this value
  std::optional<int64_t> prune_target;
  // called after every optimal solve; returning true halts the loop
  std::function<bool(const Rlm&, const LpSolution&)> on_iterate;
  double penalty_start = 2.0;
  double penalty_limit = 2.0 * 16 * 16 * 16 * 16 * 16;
};

enum class CgStatus {
  Converged,  // no violated pattern remains (or the search budget gave up)
  Pruned,     // safe bound reached the prune target
  Stalled,    // repeated dual anomaly or no progress
  Halted,     // the iterate callback asked to stop
  TimeLimit,
};

const char* to_string(CgStatus s);

struct CgOutcome {
  CgStatus status = CgStatus::Converged;
  LpSolution solution;
  std::optional<Rational> bound;  // safe lower bound on the (capped) master value
  ScaledDuals duals;
  Wide dual_objective = 0;
  std::optional<Wide> min_reduced_cost;
  std::optional<int64_t> root_cap;  // Rule-1 cap still in force at the end
  bool used_penalty = false;
  int iterations = 0;
};

// Builds the pricer input for the RLM's items and cuts under scaled duals.
PricerInput make_pricer_input(const Rlm& rlm, const ScaledDuals& s, const std::vector<ItemPair>& conflicts,
                              std::optional<int64_t> waste_cap, bool binary_mode, int zeta);

// gamma = z / sum d w
double dual_value_gamma(double z, int64_t weighted_demand);
// true iff every pi_i < gamma w_i - 1e-9
bool dual_value_update_permitted(const std::vector<double>& pi, const std::vector<RowItem>& items, double gamma);

bool binary_pricing_enabled(int64_t distinct_items, int64_t total_demand);

// R^t = (inc - 1) W - sum d w ; nullopt when not binding
std::optional<int64_t> incumbent_waste_cap(int64_t incumbent, int64_t roll_width, int64_t weighted_demand);
// R^r = floor(z W) - sum d w, at least 0
int64_t root_waste_cap(double z, int64_t roll_width, int64_t weighted_demand);
// Removes active columns with waste above the cap.
int apply_waste_cap(Rlm& rlm, int64_t cap);

// With the scaled dual made feasible by the divisor K - min(B, 0), a column with integer
// reduced cost c is parked iff z + c_feasible > incumbent - 1.
bool mcrc_parks(Wide dual_objective, Wide reduced_cost, std::optional<Wide> min_reduced_cost, int64_t K,
                int64_t incumbent);
// Removes parkable active columns and returns them. Columns for which keep() holds stay.
std::vector<Pattern> mcrc_clean(Rlm& rlm, const ScaledDuals& s, Wide dual_objective,
                                std::optional<Wide> min_reduced_cost, int64_t incumbent,
                                const std::function<bool(const Pattern&)>& keep);

CgOutcome run_cg(Rlm& rlm, CgOptions opts, CgStats& stats);

}  // namespace csp
