#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "csp/rational.hpp"

namespace csp {

struct SafeParams {
  int64_t K = int64_t{1} << 49;
  int64_t M = int64_t{1} << 38;
  double C = 1.0;
  double eps_prime = 2.5e-12;

  // small_eps=false selects the coarse regime (tolerance 1e-9, M = 2^29).
  static SafeParams make(bool small_eps = true);
  // C is 400 when the LP backend cannot reach eps_prime, 1 otherwise.
  void adapt_to_backend(double backend_tolerance_floor);
};

struct ScaledDuals {
  int64_t K = 0;
  int64_t M = 0;
  int halvings = 0;
  std::vector<int64_t> pi_int;   // per item row
  std::vector<int64_t> rho_int;  // per cut row

  // A pattern is violated iff its exact reduced cost is below this value.
  int64_t threshold() const { return -(K / M); }
};

// Floors K*pi and K*rho. Negative pi and positive rho are clamped to 0 first.
// K is halved until sum(d*pi_int) fits int64 and sum(rho_int) >= INT64_MIN.
ScaledDuals scale_duals(std::span<const double> pi, std::span<const int64_t> demands,
                        std::span<const double> rho, const SafeParams& params);

// sum d_i pi_int_i + sum rho_int_T, i.e. the dual objective at scale K.
Wide dual_objective_int(const ScaledDuals& s, std::span<const int64_t> demands);

// K - sum a_i pi_int_i - sum_{T hit} rho_int_T ; items given as (row, count).
Wide reduced_cost_int(const ScaledDuals& s, std::span<const std::pair<int, int64_t>> items,
                      std::span<const int> cuts_hit);

// Lower bound from a possibly infeasible dual: z/(K - c) for c < 0, z/K otherwise.
// An absent min reduced cost means no pattern exists, treated as c >= 0.
Rational z_safe(Wide dual_objective_K, std::optional<Wide> min_reduced_cost_K, int64_t K);

}  // namespace csp
