#include <gtest/gtest.h>

#include <sstream>

#include "csp/cg.hpp"
#include "csp/master.hpp"

using namespace csp;

namespace {

Pattern pat(std::vector<std::pair<int64_t, int64_t>> size_count) {
  std::vector<PatternEntry> e;
  for (auto [s, c] : size_count) e.push_back({s, s, c});
  return Pattern(e);
}

Rlm tiny_rlm() { return Rlm({{7, 7, 1}, {5, 5, 2}, {3, 3, 1}}, 10, SafeParams{}); }

}  // namespace

TEST(Rlm, SingleColumnCoveringAll) {
  Rlm rlm({{4, 4, 1}, {3, 3, 1}, {2, 2, 1}}, 10, SafeParams{});
  int k = rlm.add_column(pat({{4, 1}, {3, 1}, {2, 1}}));
  LpSolution sol = rlm.solve(SolveMode::Fresh);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 1.0, 1e-9);
  EXPECT_NEAR(sol.lambda[k], 1.0, 1e-9);
  EXPECT_TRUE(sol.pure());
}

TEST(Rlm, TwoByThree) {
  Rlm rlm = tiny_rlm();
  rlm.add_column(pat({{7, 1}, {3, 1}}));
  rlm.add_column(pat({{5, 2}}));
  LpSolution sol = rlm.solve(SolveMode::Warm);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_NEAR(sol.objective, 2.0, 1e-9);
  double p7 = sol.pi[rlm.item_row(7)], p5 = sol.pi[rlm.item_row(5)], p3 = sol.pi[rlm.item_row(3)];
  EXPECT_LE(p7 + p3, 1.0 + 1e-9);
  EXPECT_LE(2 * p5, 1.0 + 1e-9);
  EXPECT_NEAR(p7 + p3 + 2 * p5, 2.0, 1e-9);

  LpSolution fresh = rlm.solve(SolveMode::Fresh);
  EXPECT_NEAR(fresh.objective, sol.objective, 1e-6);
}

TEST(Rlm, PenaltyColumnsKeepLpFeasible) {
  Rlm rlm = tiny_rlm();
  rlm.add_column(pat({{7, 1}, {3, 1}}));
  LpSolution sol = rlm.solve(SolveMode::Fresh);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_FALSE(sol.pure());
  EXPECT_NEAR(sol.penalty_mass, 2.0, 1e-9);
  EXPECT_NEAR(sol.lp_objective, 1.0 + 2.0 * rlm.penalty(), 1e-9);
}

TEST(Rlm, AddColumnsDedupes) {
  Rlm rlm = tiny_rlm();
  EXPECT_EQ(rlm.add_columns({pat({{7, 1}, {3, 1}}), pat({{5, 2}})}), 2);
  EXPECT_EQ(rlm.add_columns({pat({{5, 2}})}), 0);
  EXPECT_EQ(rlm.add_column(pat({{5, 2}})), -1);
  EXPECT_EQ(rlm.active_columns(), 2);
  int k = rlm.find_column(pat({{5, 2}}));
  ASSERT_GE(k, 0);
  rlm.remove_column(k);
  EXPECT_FALSE(rlm.column_alive(k));
  EXPECT_EQ(rlm.add_column(pat({{5, 2}})), k);
  EXPECT_TRUE(rlm.column_alive(k));
}

TEST(Rlm, CutCoefficients) {
  Rlm rlm({{7, 7, 1}, {5, 5, 1}, {3, 3, 1}, {2, 2, 1}}, 12, SafeParams{});
  int a = rlm.add_column(pat({{7, 1}, {5, 1}}));
  int b = rlm.add_column(pat({{7, 1}, {2, 1}}));
  int c = rlm.add_column(pat({{5, 1}, {3, 1}, {2, 1}}));
  ASSERT_TRUE(rlm.add_cut({7, 5, 3}));
  EXPECT_FALSE(rlm.add_cut({3, 5, 7}));
  EXPECT_EQ(rlm.add_cuts({{7, 5, 3}}), 0);
  EXPECT_DOUBLE_EQ(rlm.cut_coefficient(a, 0), 1.0);
  EXPECT_DOUBLE_EQ(rlm.cut_coefficient(b, 0), 0.0);
  EXPECT_DOUBLE_EQ(rlm.cut_coefficient(c, 0), 1.0);
  LpSolution sol = rlm.solve(SolveMode::Fresh);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  EXPECT_EQ(sol.rho.size(), 1u);
  EXPECT_LE(sol.rho[0], 1e-9);
}

TEST(Rlm, CutRejectsNonUnitItems) {
  Rlm rlm = tiny_rlm();
  EXPECT_THROW(rlm.add_cut({7, 5, 3}), std::invalid_argument);
}

TEST(DualValueColumns, Gamma) {
  EXPECT_DOUBLE_EQ(dual_value_gamma(4.0, 40), 0.1);
  Rlm rlm = tiny_rlm();
  rlm.add_column(pat({{7, 1}, {3, 1}}));
  rlm.add_column(pat({{5, 2}}));
  rlm.install_dual_value_columns(0.1);
  EXPECT_TRUE(rlm.has_dual_value_columns());
  EXPECT_DOUBLE_EQ(rlm.gamma(), 0.1);
  std::ostringstream lp;
  rlm.dump_lp(lp);
  EXPECT_NE(lp.str().find("0.7"), std::string::npos);
  LpSolution sol = rlm.solve(SolveMode::Fresh);
  ASSERT_EQ(sol.status, LpStatus::Optimal);
  // pi_i <= gamma w_i holds for every item
  for (const auto& it : rlm.items()) EXPECT_LE(sol.pi[rlm.item_row(it.id)], 0.1 * static_cast<double>(it.size) + 1e-9);
  rlm.remove_dual_value_columns();
  EXPECT_FALSE(rlm.has_dual_value_columns());
  EXPECT_NEAR(rlm.solve(SolveMode::Warm).objective, 2.0, 1e-9);
}

TEST(DualValueColumns, UpdateRule) {
  std::vector<RowItem> items{{7, 7, 1}, {3, 3, 1}};
  EXPECT_TRUE(dual_value_update_permitted({0.6, 0.2}, items, 0.1));
  EXPECT_FALSE(dual_value_update_permitted({0.7, 0.2}, items, 0.1));
  EXPECT_FALSE(dual_value_update_permitted({0.6, 0.3 - 5e-10}, items, 0.1));
}

TEST(DualAnomaly, ThresholdIsStrict) {
  Rlm rlm({{5, 5, 1}}, 10, SafeParams{});
  rlm.add_column(pat({{5, 1}}));
  ScaledDuals s;
  s.K = 16;
  s.M = 4;
  s.pi_int = {0};
  EXPECT_FALSE(rlm.detect_dual_anomaly(s));
  s.pi_int = {21};
  EXPECT_EQ(rlm.exact_reduced_cost(0, s), -5);
  EXPECT_TRUE(rlm.detect_dual_anomaly(s));
  s.pi_int = {20};
  EXPECT_FALSE(rlm.detect_dual_anomaly(s));
}

TEST(Mcrc, ParkRule) {
  const int64_t K = 10;
  EXPECT_TRUE(mcrc_parks(102, 9, Wide{0}, K, 12));
  EXPECT_FALSE(mcrc_parks(102, 7, Wide{0}, K, 12));
  EXPECT_FALSE(mcrc_parks(102, 8, Wide{0}, K, 12));
  // negative B enlarges the divisor: z = 102/12 = 8.5, c = (9+2)/12
  EXPECT_FALSE(mcrc_parks(102, 9, Wide{-2}, K, 12));
  EXPECT_TRUE(mcrc_parks(102, 40, Wide{-2}, K, 10));
}

TEST(Mcrc, CleanKeepsProtectedColumns) {
  Rlm rlm = tiny_rlm();
  int a = rlm.add_column(pat({{7, 1}, {3, 1}}));
  int b = rlm.add_column(pat({{5, 2}}));
  int c = rlm.add_column(pat({{7, 1}}));
  ScaledDuals s;
  s.K = 16;
  s.M = 4;
  s.pi_int = {8, 8, 8};  // per item row: 7, 5, 3
  Wide z = dual_objective_int(s, rlm.demands());
  // incumbent 3: only columns pushing z + c over 2 go
  auto parked = mcrc_clean(rlm, s, z, Wide{0}, 3, [&](const Pattern& p) { return p == rlm.column(b); });
  EXPECT_TRUE(rlm.column_alive(a));
  EXPECT_TRUE(rlm.column_alive(b));
  EXPECT_FALSE(rlm.column_alive(c));
  ASSERT_EQ(parked.size(), 1u);
  EXPECT_EQ(parked[0], pat({{7, 1}}));
}

TEST(WasteCap, Examples) {
  EXPECT_EQ(incumbent_waste_cap(5, 10, 38), 2);
  EXPECT_FALSE(incumbent_waste_cap(9, 10, 38).has_value());
  EXPECT_EQ(root_waste_cap(4.2, 10, 38), 4);
  EXPECT_EQ(root_waste_cap(3.0, 10, 38), 0);

  Rlm rlm({{9, 9, 1}, {7, 7, 2}, {5, 5, 3}}, 10, SafeParams{});
  int keep = rlm.add_column(pat({{9, 1}}));
  int drop = rlm.add_column(pat({{7, 1}}));
  EXPECT_EQ(apply_waste_cap(rlm, 2), 1);
  EXPECT_TRUE(rlm.column_alive(keep));
  EXPECT_FALSE(rlm.column_alive(drop));
  EXPECT_EQ(apply_waste_cap(rlm, 10), 0);
}

TEST(BinaryPricing, Gate) {
  EXPECT_TRUE(binary_pricing_enabled(4, 6));
  EXPECT_FALSE(binary_pricing_enabled(10, 12));
}

TEST(RunCg, ConvergesToLpValueWithSafeBound) {
  Rlm rlm({{5, 5, 2}, {4, 4, 2}, {3, 3, 4}}, 10, SafeParams{});
  CgStats stats;
  CgOutcome out = run_cg(rlm, CgOptions{}, stats);
  EXPECT_EQ(out.status, CgStatus::Converged);
  EXPECT_NEAR(out.solution.objective, 3.0, 1e-9);
  ASSERT_TRUE(out.bound.has_value());
  EXPECT_EQ(out.bound->ceil(), 3);
  EXPECT_LE(out.bound->to_double(), 3.0 + 1e-12);
  EXPECT_GT(stats.lp_solves, 0);
  EXPECT_GT(stats.columns_added, 0);
}

TEST(RunCg, PruneTargetStopsEarly) {
  Rlm rlm({{5, 5, 2}, {4, 4, 2}, {3, 3, 4}}, 10, SafeParams{});
  CgOptions o;
  o.prune_target = 3;
  CgStats stats;
  CgOutcome out = run_cg(rlm, o, stats);
  EXPECT_EQ(out.status, CgStatus::Pruned);
  EXPECT_GE(out.bound->ceil(), 3);
}
