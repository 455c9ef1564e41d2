#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "csp/node.hpp"
#include "csp/pattern.hpp"
#include "csp/rational.hpp"

namespace csp {

struct PricingItem {
  ItemId id = 0;
  int64_t size = 0;
  int64_t demand = 0;
  int64_t pi_int = 0;
};

struct PricingCut {
  std::array<ItemId, 3> items{};
  int64_t rho_int = 0;
};

// Node-level view handed to the pricer.
struct PricingProblem {
  int64_t roll_width = 0;
  int64_t K = 0;
  int64_t M = 1;
  std::optional<int64_t> waste_cap;
  bool binary_mode = false;
  int zeta = 3;
  std::vector<PricingItem> items;
  std::vector<ItemPair> conflicts;
  std::vector<PricingCut> cuts;
};

struct PricerItem {
  ItemId id = 0;
  int64_t size = 0;
  int64_t pi = 0;
  int copies = 0;
  int part = 3;  // 1 cut items, 2 conflict items, 3 the rest
  std::vector<int> cuts;
  std::vector<int> conflicts;  // other item indices
};

struct PricerInput {
  int64_t W = 0;
  int64_t K = 0;
  int64_t M = 1;
  std::optional<int64_t> waste_cap;
  bool binary_mode = false;
  int zeta = 3;
  std::vector<PricerItem> items;
  std::vector<int> seq;  // seq[i-1] = item index of copy i
  std::vector<int> next_distinct;  // for 1-based i: largest i' < i holding another item, else 0
  std::vector<std::array<int, 3>> cut_items;
  std::vector<int64_t> rho;

  int64_t threshold() const { return -(K / M); }
  int64_t copies() const { return static_cast<int64_t>(seq.size()); }
  int64_t multi_budget() const { return copies() * W / 10; }
  int64_t safe_budget() const { return copies() * W / 50; }
};

PricerInput order_items(const PricingProblem& prob);

class DpTable {
 public:
  static constexpr int64_t kInf = std::numeric_limits<int64_t>::max();
  DpTable() = default;
  DpTable(int64_t n, int64_t W) : n_(n), W_(W), v_(static_cast<size_t>((n + 1) * (W + 1)), kInf) {}
  int64_t operator()(int64_t i, int64_t r) const { return v_[static_cast<size_t>(i * (W_ + 1) + r)]; }
  int64_t& at(int64_t i, int64_t r) { return v_[static_cast<size_t>(i * (W_ + 1) + r)]; }
  int64_t rows() const { return n_; }
  int64_t width() const { return W_; }

 private:
  int64_t n_ = 0, W_ = 0;
  std::vector<int64_t> v_;
};

DpTable build_dp(const PricerInput& in);

struct PricedPattern {
  std::vector<int> counts;  // per distinct item
  Wide reduced_cost = 0;
};

struct PoolResult {
  std::vector<PricedPattern> pool;
  int64_t calls = 0;
  bool budget_hit = false;
};

PoolResult multiple_pattern_generation(const PricerInput& in, const DpTable& dp);
std::vector<PricedPattern> filter_pool(std::vector<PricedPattern> pool, const PricerInput& in);

// Minimum reduced-cost pattern strictly below `bound`, or nullopt. budget < 0 means unlimited.
std::optional<PricedPattern> best_pattern_search(const PricerInput& in, const DpTable& dp, Wide bound,
                                                 int64_t budget, int64_t* calls = nullptr);
// Seeds the search with the best pool member, or the violation threshold.
std::optional<PricedPattern> best_pattern_search(const PricerInput& in, const DpTable& dp,
                                                 const std::vector<PricedPattern>& pool);

struct SafeBoundResult {
  std::optional<Wide> bound;  // nullopt: no nonempty pattern exists
  bool exact = false;
  int64_t expansions = 0;
};

SafeBoundResult safe_bound_pricer(const PricerInput& in, const DpTable& dp, int64_t budget = -2);

// Exact reduced cost of a count vector, including cut terms.
Wide priced_reduced_cost(const PricerInput& in, const std::vector<int>& counts);
Pattern to_pattern(const PricerInput& in, const PricedPattern& p);
std::vector<int> to_counts(const PricerInput& in, const Pattern& p);

}  // namespace csp
