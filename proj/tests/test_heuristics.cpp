#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "csp/heuristics.hpp"
#include "csp/master.hpp"
#include "support/oracle.hpp"

using namespace csp;

namespace {

Pattern sized(std::vector<std::pair<int64_t, int64_t>> size_count) {
  std::vector<PatternEntry> e;
  for (auto [s, c] : size_count) e.push_back({s, s, c});
  return Pattern(e);
}

// every valid node-level pattern
std::vector<Pattern> all_node_patterns(const NodeState& node) {
  std::vector<const NodeItem*> items = node.active_items();
  std::vector<Pattern> out;
  std::vector<PatternEntry> cur;
  std::function<void(size_t, int64_t)> rec = [&](size_t j, int64_t left) {
    if (j == items.size()) {
      if (cur.empty()) return;
      std::vector<PatternEntry> e = cur;
      std::sort(e.begin(), e.end(), [](auto& a, auto& b) { return a.id < b.id; });
      Pattern p(e);
      if (node.pattern_valid(p)) out.push_back(p);
      return;
    }
    for (int64_t c = 0; c <= items[j]->demand() && c * items[j]->size <= left; ++c) {
      if (c > 0) cur.push_back({items[j]->id, items[j]->size, c});
      rec(j + 1, left - c * items[j]->size);
      if (c > 0) cur.pop_back();
    }
  };
  rec(0, node.roll_width());
  return out;
}

// Full-enumeration relaxation standing in for column generation.
RelaxFn exhaustive_relax() {
  return [](const NodeState& residual, const std::set<Pattern>& banned, const ExtraRow* extra,
            const IterateFn& on_iterate) -> std::optional<RelaxOutput> {
    std::vector<RowItem> rows;
    for (const auto* it : residual.active_items()) rows.push_back({it->id, it->size, it->demand()});
    Rlm rlm(rows, residual.roll_width(), SafeParams{});
    std::vector<Pattern> cols;
    for (auto& p : all_node_patterns(residual))
      if (!banned.count(p)) cols.push_back(p);
    rlm.add_columns(cols);
    if (extra) rlm.set_extra_row(extra->members, extra->rhs);
    LpSolution sol = rlm.solve(SolveMode::Fresh);
    if (sol.status != LpStatus::Optimal || !sol.pure()) return std::nullopt;
    auto primal = rlm.primal(sol);
    on_iterate(primal, sol.objective);
    RelaxOutput out;
    for (const auto& c : primal) out.primal.emplace_back(*c.pattern, c.value);
    out.objective = sol.objective;
    return out;
  };
}

}  // namespace

TEST(Bfd, Examples) {
  auto bins = bfd({{7, 1}, {5, 2}, {3, 1}}, 10);
  ASSERT_EQ(bins.size(), 2u);
  EXPECT_EQ(bins[0], (std::vector<int64_t>{7, 3}));
  EXPECT_EQ(bins[1], (std::vector<int64_t>{5, 5}));
  EXPECT_EQ(bfd({{5, 2}, {4, 2}, {3, 4}}, 10).size(), 4u);
  EXPECT_EQ(oracle::optimum(make_instance(10, {{5, 2}, {4, 2}, {3, 4}})), 3);
  EXPECT_EQ(bfd({{6, 1}}, 10).size(), 1u);
}

TEST(Bfd, AlwaysAValidSolution) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    Instance inst = oracle::random_instance(rng, 10, 50, 5);
    Solution sol{bfd(inst.items, inst.roll_width)};
    std::string why;
    EXPECT_TRUE(verify_solution(inst, sol, &why)) << why;
    EXPECT_GE(sol.value(), volume_bound(inst));
  }
}

TEST(Bfd, NodeLevelRespectsConflicts) {
  NodeState s = NodeState::root(make_instance(10, {{7, 1}, {5, 2}, {3, 1}}), true);
  s.apply(ItemPair::of(7, 3), Side::Right);
  auto pats = bfd_patterns(s);
  for (const auto& p : pats) EXPECT_TRUE(s.pattern_valid(p));
  auto bins = s.expand(pats);
  ASSERT_TRUE(bins.has_value());
  EXPECT_EQ(pats.size(), 3u);
}

TEST(VerifySolution, RejectsBadCovers) {
  Instance inst = make_instance(10, {{7, 1}, {5, 2}, {3, 1}});
  std::string why;
  EXPECT_TRUE(verify_solution(inst, Solution{{{7, 3}, {5, 5}}}, &why));
  EXPECT_FALSE(verify_solution(inst, Solution{{{7, 5}, {5, 3}}}, &why));
  EXPECT_FALSE(verify_solution(inst, Solution{{{7, 3}, {5}}}, &why));
  EXPECT_FALSE(verify_solution(inst, Solution{{{7, 3}, {5, 5}, {3}}}, &why));
}

TEST(Rounding, Budget) {
  EXPECT_EQ(rounding_budget(5, 10, 38), 2);
  EXPECT_LT(rounding_budget(4, 10, 38), 0);
}

TEST(Rounding, NegativeBudgetGivesNothing) {
  // total size 38, incumbent 4 already equals the volume bound
  NodeState s = NodeState::root(make_instance(10, {{9, 2}, {8, 1}, {6, 2}}), true);
  Pattern a = sized({{9, 1}});
  std::vector<PrimalColumn> primal{{&a, 2.0}};
  EXPECT_FALSE(rounding(primal, s, 4).has_value());
}

TEST(Rounding, IntegralPrimalReturnedVerbatim) {
  NodeState s = NodeState::root(make_instance(10, {{7, 1}, {5, 2}, {3, 1}}), true);
  Pattern a = sized({{7, 1}, {3, 1}});
  Pattern b = sized({{5, 2}});
  std::vector<PrimalColumn> primal{{&a, 1.0}, {&b, 1.0}};
  auto r = rounding(primal, s, 3);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->size(), 2u);
  EXPECT_NE(std::find(r->begin(), r->end(), a), r->end());
  EXPECT_NE(std::find(r->begin(), r->end(), b), r->end());
  EXPECT_FALSE(rounding(primal, s, 2).has_value());
}

TEST(Rounding, FractionalPatternWithinBudget) {
  // W=10, total 38, incumbent 5: budget 2; the 0.7 pattern wastes 1
  NodeState s = NodeState::root(make_instance(10, {{9, 2}, {8, 1}, {6, 2}}), true);
  Pattern a = sized({{9, 1}});
  Pattern b = sized({{8, 1}});
  Pattern c = sized({{6, 1}});
  std::vector<PrimalColumn> primal{{&a, 1.7}, {&b, 1.0}, {&c, 2.0}};
  auto r = rounding(primal, s, 6);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->size(), 5u);
  EXPECT_TRUE(s.expand(*r).has_value());
}

TEST(Rounding, ResultsAreValidCovers) {
  std::mt19937_64 rng(12);
  int found = 0;
  for (int t = 0; t < 100; ++t) {
    Instance inst = oracle::random_instance(rng, 6, 20, 3);
    NodeState s = NodeState::root(inst, true);
    auto pats = all_node_patterns(s);
    std::vector<PrimalColumn> primal;
    std::uniform_real_distribution<double> ud(0.0, 1.5);
    for (const auto& p : pats) primal.push_back({&p, ud(rng) < 0.5 ? 0.0 : ud(rng)});
    int64_t inc = static_cast<int64_t>(bfd(inst.items, inst.roll_width).size()) + 1;
    if (auto r = rounding(primal, s, inc)) {
      ++found;
      EXPECT_LT(static_cast<int64_t>(r->size()), inc);
      for (const auto& p : *r) EXPECT_TRUE(s.pattern_valid(p));
      EXPECT_TRUE(s.expand(*r).has_value());
    }
  }
  EXPECT_GT(found, 0);
}

TEST(IntegralityRatio, Examples) {
  Pattern a = sized({{1, 1}}), b = sized({{2, 1}}), c = sized({{3, 1}}), d = sized({{4, 1}});
  EXPECT_DOUBLE_EQ(integrality_ratio({{&a, 2.0}, {&b, 1.0}, {&c, 0.5}, {&d, 0.5}}), 0.75);
  EXPECT_DOUBLE_EQ(integrality_ratio({{&c, 0.5}, {&d, 0.25}}), 0.0);
  EXPECT_DOUBLE_EQ(integrality_ratio({{&a, 2.0}, {&b, 1.0}}), 1.0);
}

TEST(RelaxAndFix, Gap) {
  EXPECT_NEAR(rf_gap(10, 8.3), 0.7, 1e-12);
  EXPECT_NEAR(rf_gap(10, 8.3) - (1.0 - 0.8), 0.5, 1e-12);
}

TEST(RelaxAndFix, FindsImprovingValidSolutions) {
  std::mt19937_64 rng(31);
  int improved = 0, optimal = 0, tried = 0;
  for (int t = 0; t < 80; ++t) {
    Instance inst = oracle::random_instance(rng, 6, 25, 3);
    NodeState root = NodeState::root(inst, true);
    int64_t inc = static_cast<int64_t>(bfd(inst.items, inst.roll_width).size()) + 1;
    ++tried;
    RfResult r = relax_and_fix(root, inc, exhaustive_relax());
    EXPECT_GT(r.relaxations, 0);
    for (size_t k = 1; k < r.candidates.size(); ++k) EXPECT_GE(r.candidates[k].value, r.candidates[0].value);
    if (!r.best) continue;
    ++improved;
    EXPECT_LT(static_cast<int64_t>(r.best->size()), inc);
    auto bins = root.expand(*r.best);
    ASSERT_TRUE(bins.has_value());
    std::string why;
    EXPECT_TRUE(verify_solution(inst, Solution{*bins}, &why)) << why;
    int64_t opt = oracle::optimum(inst);
    EXPECT_GE(static_cast<int64_t>(r.best->size()), opt);
    optimal += static_cast<int64_t>(r.best->size()) == opt;
  }
  EXPECT_GT(improved, tried / 2);
  EXPECT_GT(optimal, improved / 2);
}

TEST(RelaxAndFix, HaltRuleStopsRelaxation) {
  NodeState root = NodeState::root(make_instance(10, {{6, 3}, {4, 3}}), true);
  std::vector<bool> answers;
  RelaxFn relax = [&](const NodeState& residual, const std::set<Pattern>& banned, const ExtraRow* extra,
                      const IterateFn& on_iterate) -> std::optional<RelaxOutput> {
    // nothing to round yet: only the objective decides
    if (answers.empty()) {
      answers.push_back(on_iterate({}, 2.5));
      answers.push_back(on_iterate({}, 2.0));
    }
    return exhaustive_relax()(residual, banned, extra, on_iterate);
  };
  // incumbent 3 is optimal, so rounding never improves it
  RfResult r = relax_and_fix(root, 3, relax);
  ASSERT_EQ(answers.size(), 2u);
  EXPECT_FALSE(answers[0]);
  EXPECT_TRUE(answers[1]);
  EXPECT_FALSE(r.best.has_value());
}

TEST(ConstrainedRelaxAndFix, RowRightHandSide) {
  std::vector<Pattern> s;
  for (int k = 0; k < 20; ++k) s.push_back(sized({{k + 1, 1}}));
  ExtraRow row = crf_row(s, 6);
  EXPECT_DOUBLE_EQ(row.rhs, 14.0);
  EXPECT_EQ(row.members.size(), 20u);
  EXPECT_DOUBLE_EQ(crf_row(s, 12).rhs, 8.0);
}

TEST(ConstrainedRelaxAndFix, ExtraRowStillFindsSolutions) {
  std::mt19937_64 rng(77);
  int found = 0;
  for (int t = 0; t < 40; ++t) {
    Instance inst = oracle::random_instance(rng, 6, 25, 3);
    NodeState root = NodeState::root(inst, true);
    auto base = bins_to_patterns(root, bfd(inst.items, inst.roll_width));
    ASSERT_TRUE(base.has_value());
    RfParams params;
    params.extra = crf_row(*base, 1);
    RfResult r = relax_and_fix(root, static_cast<int64_t>(base->size()) + 1, exhaustive_relax(), params);
    if (!r.best) continue;
    ++found;
    EXPECT_TRUE(root.expand(*r.best).has_value());
  }
  EXPECT_GT(found, 10);
}

TEST(BinsToPatterns, MatchesRoot) {
  NodeState root = NodeState::root(make_instance(10, {{7, 1}, {5, 2}, {3, 1}}), false);
  auto pats = bins_to_patterns(root, {{7, 3}, {5, 5}});
  ASSERT_TRUE(pats.has_value());
  EXPECT_EQ(pats->size(), 2u);
  EXPECT_TRUE(root.expand(*pats).has_value());
  EXPECT_FALSE(bins_to_patterns(root, {{7, 3}, {5, 5}, {5}}).has_value());
}
