#include <gtest/gtest.h>

#include <random>

#include "csp/pricing.hpp"
#include "support/pricing_oracle.hpp"

using namespace csp;

namespace {

// K=16, M=4, W=5: size 3 priced 12, two copies of size 2 priced 9
PricingProblem toy() {
  PricingProblem p;
  p.roll_width = 5;
  p.K = 16;
  p.M = 4;
  p.items = {{3, 3, 1, 12}, {2, 2, 2, 9}};
  return p;
}

}  // namespace

TEST(OrderItems, CutItemsEnumeratedFirst) {
  PricingProblem p;
  p.roll_width = 20;
  p.K = 16;
  p.items = {{1, 9, 1, 5}, {2, 8, 1, 5}, {3, 7, 1, 5}, {4, 6, 1, 5}, {5, 5, 1, 5}, {6, 4, 1, 5}};
  p.cuts = {{{4, 5, 6}, -3}};
  p.conflicts = {ItemPair::of(2, 3)};
  PricerInput in = order_items(p);
  ASSERT_EQ(in.seq.size(), 6u);
  // the sequence runs plain items, then conflict items, then cut items
  std::vector<ItemId> order;
  for (int k : in.seq) order.push_back(in.items[k].id);
  EXPECT_EQ(order, (std::vector<ItemId>{1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(in.items[in.seq[0]].part, 3);
  EXPECT_EQ(in.items[in.seq[1]].part, 2);
  EXPECT_EQ(in.items[in.seq[5]].part, 1);
}

TEST(OrderItems, PlainSizeOrderAndCopies) {
  PricingProblem p;
  p.roll_width = 10;
  p.K = 16;
  p.items = {{1, 2, 3, 1}, {2, 4, 5, 1}, {3, 7, 1, 1}};
  PricerInput in = order_items(p);
  ASSERT_EQ(in.items.size(), 3u);
  int four = -1;
  for (size_t k = 0; k < in.items.size(); ++k)
    if (in.items[k].size == 4) four = static_cast<int>(k);
  ASSERT_GE(four, 0);
  EXPECT_EQ(in.items[four].copies, 2);
  std::vector<int64_t> sizes;
  for (int k : in.seq) sizes.push_back(in.items[k].size);
  EXPECT_TRUE(std::is_sorted(sizes.begin(), sizes.end(), std::greater<>()));
}

TEST(BuildDp, ToyValue) {
  PricerInput in = order_items(toy());
  DpTable dp = build_dp(in);
  EXPECT_EQ(dp(3, 5), -5);
}

TEST(BuildDp, ZeroDuals) {
  PricingProblem p = toy();
  for (auto& it : p.items) it.pi_int = 0;
  PricerInput in = order_items(p);
  DpTable dp = build_dp(in);
  for (int64_t r = 0; r <= 5; ++r) EXPECT_EQ(dp(3, r), 16);
}

TEST(BuildDp, ZeroWasteCap) {
  PricingProblem p = toy();
  p.waste_cap = 0;
  PricerInput in = order_items(p);
  DpTable dp = build_dp(in);
  EXPECT_EQ(dp(0, 0), 16);
  for (int64_t r = 1; r <= 5; ++r) EXPECT_EQ(dp(0, r), DpTable::kInf);
}

TEST(MultiplePatterns, ToyPool) {
  PricerInput in = order_items(toy());
  DpTable dp = build_dp(in);
  PoolResult pool = multiple_pattern_generation(in, dp);
  ASSERT_EQ(pool.pool.size(), 1u);
  EXPECT_EQ(pool.pool[0].reduced_cost, -5);
  Pattern pat = to_pattern(in, pool.pool[0]);
  EXPECT_EQ(pat.count(3), 1);
  EXPECT_EQ(pat.count(2), 1);
}

TEST(MultiplePatterns, ZeroDualsGiveNothing) {
  PricingProblem p = toy();
  for (auto& it : p.items) it.pi_int = 0;
  PricerInput in = order_items(p);
  DpTable dp = build_dp(in);
  EXPECT_TRUE(multiple_pattern_generation(in, dp).pool.empty());
  EXPECT_FALSE(best_pattern_search(in, dp, Wide{in.threshold()}, -1).has_value());
}

TEST(MultiplePatterns, ConflictRemovesOnlyViolatedPattern) {
  PricingProblem p = toy();
  p.conflicts = {ItemPair::of(3, 2)};
  PricerInput in = order_items(p);
  DpTable dp = build_dp(in);
  EXPECT_TRUE(multiple_pattern_generation(in, dp).pool.empty());
  EXPECT_FALSE(best_pattern_search(in, dp, Wide{in.threshold()}, -1).has_value());
}

TEST(BestPatternSearch, ToyAndDeeperMinimum) {
  PricerInput in = order_items(toy());
  DpTable dp = build_dp(in);
  auto best = best_pattern_search(in, dp, Wide{in.threshold()}, -1);
  ASSERT_TRUE(best.has_value());
  EXPECT_EQ(best->reduced_cost, -5);

  // {3,2} at -5 and {2,2,2} at -6
  PricingProblem p;
  p.roll_width = 6;
  p.K = 16;
  p.M = 4;
  p.items = {{3, 3, 1, 12}, {2, 2, 3, 9}, {1, 1, 1, 0}};
  PricerInput in2 = order_items(p);
  DpTable dp2 = build_dp(in2);
  auto b2 = best_pattern_search(in2, dp2, Wide{-5}, -1);
  ASSERT_TRUE(b2.has_value());
  EXPECT_EQ(b2->reduced_cost, oracle::min_reduced_cost(p).value());
  EXPECT_EQ(b2->reduced_cost, -11);
}

TEST(SafeBoundPricer, SoundAndExactOnToy) {
  PricerInput in = order_items(toy());
  DpTable dp = build_dp(in);
  SafeBoundResult sb = safe_bound_pricer(in, dp);
  ASSERT_TRUE(sb.bound.has_value());
  EXPECT_EQ(*sb.bound, -5);

  PricingProblem p = toy();
  p.items[0].pi_int = 2;
  p.items[1].pi_int = 1;
  PricerInput in2 = order_items(p);
  DpTable dp2 = build_dp(in2);
  SafeBoundResult sb2 = safe_bound_pricer(in2, dp2);
  ASSERT_TRUE(sb2.bound.has_value());
  EXPECT_LE(*sb2.bound, oracle::min_reduced_cost(p).value());
}

TEST(SafeBoundPricer, TinyBudgetStillBounds) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    PricingProblem p = oracle::random_pricing_problem(rng, 10, 30, 3);
    PricerInput in = order_items(p);
    DpTable dp = build_dp(in);
    auto truth = oracle::min_reduced_cost(p);
    SafeBoundResult sb = safe_bound_pricer(in, dp, 1);
    if (!truth) continue;
    ASSERT_TRUE(sb.bound.has_value()) << t;
    EXPECT_LE(*sb.bound, *truth) << t;
    SafeBoundResult full = safe_bound_pricer(in, dp, -1);
    ASSERT_TRUE(full.bound.has_value());
    EXPECT_LE(*full.bound, *truth);
    if (full.exact) EXPECT_EQ(*full.bound, *truth) << t;
  }
}

TEST(FilterPool, CapsPatternsPerItem) {
  PricingProblem p;
  p.roll_width = 10;
  p.K = 100;
  p.M = 10;
  p.zeta = 3;
  p.items = {{1, 5, 1, 60}, {2, 4, 1, 50}, {3, 3, 1, 40}, {4, 2, 1, 30}, {5, 1, 1, 20}};
  PricerInput in = order_items(p);
  auto counts_for = [&](std::vector<ItemId> ids) {
    std::vector<int> c(in.items.size(), 0);
    for (auto id : ids)
      for (size_t k = 0; k < in.items.size(); ++k)
        if (in.items[k].id == id) c[k] = 1;
    return c;
  };
  std::vector<PricedPattern> pool;
  for (std::vector<ItemId> ids : {std::vector<ItemId>{1, 2}, {1, 3}, {1, 4}, {1, 5}, {1, 2, 5}}) {
    auto c = counts_for(ids);
    pool.push_back({c, priced_reduced_cost(in, c)});
  }
  auto out = filter_pool(pool, in);
  int with_one = 0;
  for (const auto& pp : out)
    if (pp.counts[0] + pp.counts[1] + pp.counts[2] + pp.counts[3] + pp.counts[4] > 0 && to_pattern(in, pp).count(1) > 0)
      ++with_one;
  EXPECT_EQ(with_one, 3);
  // the three cheapest patterns holding item 1 survive
  std::vector<Wide> rcs;
  for (const auto& pp : out) rcs.push_back(pp.reduced_cost);
  std::vector<Wide> all;
  for (const auto& pp : pool) all.push_back(pp.reduced_cost);
  std::sort(all.begin(), all.end());
  std::sort(rcs.begin(), rcs.end());
  EXPECT_EQ(rcs, std::vector<Wide>(all.begin(), all.begin() + 3));

  std::vector<PricedPattern> small(pool.begin(), pool.begin() + 2);
  auto same = filter_pool(small, in);
  ASSERT_EQ(same.size(), 2u);
  EXPECT_EQ(same[0].counts, small[0].counts);
  EXPECT_EQ(same[1].counts, small[1].counts);
}

TEST(FilterPool, TiesKeepEarlierPattern) {
  PricingProblem p;
  p.roll_width = 10;
  p.K = 100;
  p.M = 10;
  p.zeta = 1;
  p.items = {{1, 5, 1, 60}, {2, 4, 1, 50}, {3, 3, 1, 50}};
  PricerInput in = order_items(p);
  std::vector<int> a(in.items.size(), 0), b(in.items.size(), 0);
  for (size_t k = 0; k < in.items.size(); ++k) {
    if (in.items[k].id == 1) a[k] = b[k] = 1;
    if (in.items[k].id == 2) a[k] = 1;
    if (in.items[k].id == 3) b[k] = 1;
  }
  std::vector<PricedPattern> pool{{a, priced_reduced_cost(in, a)}, {b, priced_reduced_cost(in, b)}};
  ASSERT_EQ(pool[0].reduced_cost, pool[1].reduced_cost);
  auto out = filter_pool(pool, in);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].counts, a);
}

TEST(Pricing, MatchesBruteForceOnRandomDuals) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    PricingProblem p = oracle::random_pricing_problem(rng, 12, 40, 3);
    PricerInput in = order_items(p);
    DpTable dp = build_dp(in);
    std::vector<std::vector<int64_t>> violated;
    auto truth = oracle::min_reduced_cost(p, &violated);
    auto best = best_pattern_search(in, dp, static_cast<Wide>(p.K) * 1000, -1);
    ASSERT_EQ(best.has_value(), truth.has_value()) << t;
    if (!truth) continue;
    ++checked;
    EXPECT_EQ(best->reduced_cost, *truth) << t;
    EXPECT_EQ(oracle::pattern_cost(p, oracle::expand_counts(in, p, best->counts)), truth) << t;

    PoolResult pool = multiple_pattern_generation(in, dp);
    for (const auto& pp : pool.pool) {
      EXPECT_LT(pp.reduced_cost, in.threshold()) << t;
      EXPECT_EQ(oracle::pattern_cost(p, oracle::expand_counts(in, p, pp.counts)), pp.reduced_cost) << t;
    }
    auto found = best_pattern_search(in, dp, Wide{in.threshold()}, -1);
    EXPECT_EQ(found.has_value(), !violated.empty()) << t;
  }
  EXPECT_GT(checked, 250);
}

TEST(Pricing, BinaryModeLimitsCopies) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    PricingProblem p = oracle::random_pricing_problem(rng, 8, 30, 2);
    p.binary_mode = true;
    PricerInput in = order_items(p);
    for (const auto& it : in.items) EXPECT_LE(it.copies, 1);
    DpTable dp = build_dp(in);
    auto truth = oracle::min_reduced_cost(p);
    auto best = best_pattern_search(in, dp, static_cast<Wide>(p.K) * 1000, -1);
    ASSERT_EQ(best.has_value(), truth.has_value());
    if (truth) EXPECT_EQ(best->reduced_cost, *truth);
  }
}
