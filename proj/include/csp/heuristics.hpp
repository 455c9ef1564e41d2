#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "csp/cuts.hpp"
#include "csp/instance.hpp"
#include "csp/node.hpp"
#include "csp/pattern.hpp"
#include "csp/rational.hpp"

namespace csp {

// Bins of original sizes.
struct Solution {
  std::vector<std::vector<int64_t>> bins;
  int64_t value() const { return static_cast<int64_t>(bins.size()); }
};

// Exact cover of every demand with capacity-feasible bins.
bool verify_solution(const Instance& inst, const Solution& sol, std::string* why = nullptr);

std::vector<std::vector<int64_t>> bfd(const std::vector<Item>& items, int64_t roll_width);
// Node-level BFD respecting the node's conflicts.
std::vector<Pattern> bfd_patterns(const NodeState& node);

int64_t rounding_budget(int64_t incumbent, int64_t roll_width, int64_t weighted_demand);

// Node-level patterns covering `node`, strictly fewer than `incumbent`, or nullopt.
std::optional<std::vector<Pattern>> rounding(const std::vector<PrimalColumn>& primal, const NodeState& node,
                                             int64_t incumbent, double lambda_min = 0.6);

double integrality_ratio(const std::vector<PrimalColumn>& primal);

struct ExtraRow {
  std::vector<Pattern> members;
  double rhs = 0.0;
};

struct RelaxOutput {
  std::vector<std::pair<Pattern, double>> primal;
  double objective = 0.0;
  std::optional<Rational> bound;
};

// Returning true from the callback stops column generation early.
using IterateFn = std::function<bool(const std::vector<PrimalColumn>&, double objective)>;
using RelaxFn = std::function<std::optional<RelaxOutput>(const NodeState& residual, const std::set<Pattern>& banned,
                                                      const ExtraRow* extra, const IterateFn& on_iterate)>;

struct RfParams {
  int runs = 3;
  double lambda_min = 0.6;
  std::optional<ExtraRow> extra;
};

struct RfCandidate {
  int64_t value = 0;             // size of the completed solution
  std::vector<Pattern> prefix;   // fixed patterns
};

struct RfResult {
  std::optional<std::vector<Pattern>> best;  // improving node-level solution
  std::vector<RfCandidate> candidates;       // one per run that completed, best first
  int64_t relaxations = 0;
};

// gap = incumbent - bound - 1
double rf_gap(int64_t incumbent, double bound);

RfResult relax_and_fix(const NodeState& node, int64_t incumbent, const RelaxFn& relax, const RfParams& params = {});

// sum over members >= |S| - k
ExtraRow crf_row(const std::vector<Pattern>& s_inc, int k);

// Root-level patterns for bins of original sizes; nullopt if the bins do not match the root.
std::optional<std::vector<Pattern>> bins_to_patterns(const NodeState& root, const std::vector<std::vector<int64_t>>& bins);

}  // namespace csp
