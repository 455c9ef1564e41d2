#include <gtest/gtest.h>

#include <random>

#include "csp/cuts.hpp"
#include "support/sri_oracle.hpp"

using namespace csp;

namespace {

Pattern ids(std::vector<std::pair<ItemId, int64_t>> id_count) {
  std::vector<PatternEntry> e;
  for (auto [id, c] : id_count) e.push_back({id, 10 + id, c});
  return Pattern(e);
}

}  // namespace

TEST(Affinity, Formula) {
  Pattern p = ids({{1, 2}, {2, 1}});
  AffinityMap aff = compute_affinities({{&p, 0.5}});
  EXPECT_DOUBLE_EQ(aff[ItemPair::of(1, 2)], 1.0);
  EXPECT_DOUBLE_EQ(aff[ItemPair::of(1, 1)], 0.5);
}

TEST(Affinity, Additive) {
  Pattern p = ids({{1, 1}, {2, 1}});
  Pattern q = ids({{1, 1}, {2, 1}, {3, 1}});
  AffinityMap aff = compute_affinities({{&p, 0.3}, {&q, 0.4}});
  EXPECT_NEAR(aff[ItemPair::of(1, 2)], 0.7, 1e-12);
  EXPECT_NEAR(aff[ItemPair::of(2, 3)], 0.4, 1e-12);
}

TEST(Affinity, IntegralPrimalGivesIntegralAffinities) {
  Pattern p = ids({{1, 1}, {2, 1}});
  Pattern q = ids({{3, 1}, {2, 1}});
  for (const auto& [pair, d] : compute_affinities({{&p, 2.0}, {&q, 1.0}})) EXPECT_DOUBLE_EQ(d, std::round(d));
}

TEST(Sri, TriangleViolated) {
  Pattern ij = ids({{1, 1}, {2, 1}});
  Pattern jk = ids({{2, 1}, {3, 1}});
  Pattern ik = ids({{1, 1}, {3, 1}});
  std::vector<PrimalColumn> primal{{&ij, 0.5}, {&jk, 0.5}, {&ik, 0.5}};
  auto cands = separate_sri(primal, compute_affinities(primal), {1, 2, 3});
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].triple, (std::array<ItemId, 3>{1, 2, 3}));
  EXPECT_NEAR(cands[0].violation, 0.5, 1e-12);
  EXPECT_NEAR(cut_lhs(primal, {1, 2, 3}), 1.5, 1e-12);
  EXPECT_TRUE(cut_hits(ij, {1, 2, 3}));
  EXPECT_FALSE(cut_hits(ids({{1, 1}, {4, 1}}), {1, 2, 3}));
}

TEST(Sri, SingleAffinityRejected) {
  Pattern ij = ids({{1, 1}, {2, 1}});
  Pattern k = ids({{3, 1}});
  std::vector<PrimalColumn> primal{{&ij, 1.2}, {&k, 1.0}};
  EXPECT_TRUE(separate_sri(primal, compute_affinities(primal), {1, 2, 3}).empty());
}

TEST(Sri, MatchesBruteForceScan) {
  std::mt19937_64 rng(17);
  int nonempty = 0;
  for (int t = 0; t < 150; ++t) {
    int n = std::uniform_int_distribution<int>(3, 30)(rng);
    int cols = std::uniform_int_distribution<int>(1, 3 * n)(rng);
    std::vector<Pattern> pats;
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (int c = 0; c < cols; ++c) {
      int len = std::uniform_int_distribution<int>(1, 4)(rng);
      std::vector<std::pair<ItemId, int64_t>> e;
      std::set<ItemId> used;
      for (int k = 0; k < len; ++k) {
        ItemId x = std::uniform_int_distribution<ItemId>(1, n)(rng);
        if (used.insert(x).second) e.emplace_back(x, 1);
      }
      std::sort(e.begin(), e.end());
      pats.push_back(ids(e));
    }
    std::vector<PrimalColumn> primal;
    for (const auto& p : pats) primal.push_back({&p, std::round(ud(rng) * 20.0) / 20.0 * 0.9});
    std::vector<ItemId> unit;
    std::set<ItemId> unit_set;
    for (ItemId x = 1; x <= n; ++x)
      if (ud(rng) < 0.85) {
        unit.push_back(x);
        unit_set.insert(x);
      }
    auto want = oracle::brute_force_violated(primal, unit);
    auto cands = separate_sri(primal, compute_affinities(primal), unit_set);
    std::vector<std::array<ItemId, 3>> got;
    for (const auto& c : cands) {
      got.push_back(c.triple);
      EXPECT_NEAR(c.violation, cut_lhs(primal, c.triple) - 1.0, 1e-12);
    }
    EXPECT_EQ(got, want) << t;
    nonempty += !want.empty();
  }
  EXPECT_GT(nonempty, 30);
}

TEST(SelectCuts, Limits) {
  std::vector<CutCandidate> c;
  for (int k = 0; k < 25; ++k) c.push_back({{k, k + 100, k + 200}, 0.01 * (k + 1)});
  auto top = select_cuts(c, 0);
  ASSERT_EQ(top.size(), 20u);
  for (const auto& t : top) EXPECT_GE(t[0], 5);
  EXPECT_TRUE(select_cuts(c, 10).empty());
  std::vector<CutCandidate> three(c.begin(), c.begin() + 3);
  EXPECT_EQ(select_cuts(three, 3).size(), 3u);
}
