#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "csp/heuristics.hpp"
#include "csp/instance.hpp"
#include "csp/node.hpp"
#include "csp/rational.hpp"

namespace csp {

struct Features {
  bool multi_pattern = true;
  bool rf = true;
  bool crf = true;
  bool splay = true;
  bool history = true;
  bool small_eps = true;
  bool dual_ineq = true;  // dual-value columns and binary pricing at the root
  bool mcrc = true;
  bool grouping = true;

  bool operator==(const Features&) const = default;
};

// (flag name, member) for the nine toggles, in command-line order
const std::vector<std::pair<std::string, bool Features::*>>& feature_table();

struct NodeBoundEvent {
  const NodeState* node = nullptr;
  Rational bound;
  Wide certified = 0;  // integer bound the search actually acts on
  int64_t cutoff = 0;  // the bound only speaks about solutions below this value
  bool root = false;
};

struct SolveConfig {
  double time_limit = 3600.0;
  Features features;
  uint64_t seed = 0;
  std::optional<int64_t> K, M;
  // only solutions with fewer bins than this are searched for
  std::optional<int64_t> cutoff;
  // stop as soon as the incumbent reaches this value
  std::optional<int64_t> stop_at;
  std::vector<std::vector<int64_t>> warm_bins;
  std::function<void(const NodeBoundEvent&)> observer;
  int64_t splay_limit = 10000;
};

enum class SolveStatus { Optimal, Feasible, InfeasibleInput, TimeLimit };

const char* to_string(SolveStatus s);

struct SolveStats {
  int64_t columns = 0;
  int64_t cuts = 0;
  int64_t nodes = 0;
  int64_t pricing_calls = 0;
  int64_t generating_calls = 0;
  int64_t lp_solves = 0;
  int64_t splays = 0;
  int64_t rf_runs = 0;
  int64_t crf_runs = 0;
  int64_t max_depth = 0;
  double pricing_seconds = 0.0;
  double lp_seconds = 0.0;
  double total_seconds = 0.0;
  double integrality_ratio = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::InfeasibleInput;
  Solution incumbent;
  int64_t value = 0;
  Rational bound;
  int64_t volume_bound = 0;
  std::optional<Rational> root_bound;
  double root_lp = 0.0;
  // the search finished without finding a solution below the cutoff
  bool cutoff_exhausted = false;
  std::vector<std::string> pool;                    // every generated pattern, in order
  std::vector<std::vector<int64_t>> root_columns;  // pool patterns usable at the root, as sizes
  SolveStats stats;
  std::string message;
};

SolveResult solve_csp(const Instance& inst, const SolveConfig& cfg = {});

}  // namespace csp
