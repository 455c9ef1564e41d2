#pragma once

#include <array>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "csp/node.hpp"
#include "csp/pattern.hpp"

namespace csp {

struct PrimalColumn {
  const Pattern* pattern = nullptr;
  double value = 0.0;
};

using AffinityMap = std::map<ItemPair, double>;

AffinityMap compute_affinities(const std::vector<PrimalColumn>& primal);

struct CutCandidate {
  std::array<ItemId, 3> triple{};  // increasing ids
  double violation = 0.0;
};

inline constexpr double kCutTolerance = 1e-6;

// Sum of primal values of patterns holding at least two members of the triple.
double cut_lhs(const std::vector<PrimalColumn>& primal, const std::array<ItemId, 3>& triple);
bool cut_hits(const Pattern& p, const std::array<ItemId, 3>& triple);

// Triples of unit-demand items whose cut is violated by more than the tolerance and
// that pass the two-positive-affinities filter. Sorted by triple.
std::vector<CutCandidate> separate_sri(const std::vector<PrimalColumn>& primal, const AffinityMap& aff,
                                       const std::set<ItemId>& unit_items);

std::vector<std::array<ItemId, 3>> select_cuts(std::vector<CutCandidate> candidates, int round,
                                               int beta = 20, int alpha = 10);

}  // namespace csp
