#include "csp/safebound.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace csp {

SafeParams SafeParams::make(bool small_eps) {
  SafeParams p;
  if (!small_eps) {
    p.M = int64_t{1} << 29;
    p.eps_prime = 1e-9;
  }
  return p;
}

void SafeParams::adapt_to_backend(double backend_tolerance_floor) {
  C = backend_tolerance_floor > eps_prime ? 400.0 : 1.0;
}

namespace {

constexpr long double kInt64Limit = 9223372036854775807.0L;

// floor(K*v) for v >= 0, or nullopt if it does not fit.
std::optional<int64_t> scaled_floor(long double K, double v) {
  long double x = std::floor(K * static_cast<long double>(v));
  if (x >= kInt64Limit || x <= -kInt64Limit) return std::nullopt;
  return static_cast<int64_t>(x);
}

}  // namespace

ScaledDuals scale_duals(std::span<const double> pi, std::span<const int64_t> demands,
                        std::span<const double> rho, const SafeParams& params) {
  if (pi.size() != demands.size()) throw std::invalid_argument("pi/demand size mismatch");
  ScaledDuals s;
  s.K = params.K;
  s.M = params.M;
  for (;;) {
    bool ok = true;
    s.pi_int.assign(pi.size(), 0);
    s.rho_int.assign(rho.size(), 0);
    Wide sum_pi = 0, sum_rho = 0;
    for (size_t i = 0; i < pi.size() && ok; ++i) {
      double v = std::isfinite(pi[i]) && pi[i] > 0 ? pi[i] : 0.0;
      auto f = scaled_floor(static_cast<long double>(s.K), v);
      if (!f) { ok = false; break; }
      s.pi_int[i] = *f;
      sum_pi += static_cast<Wide>(demands[i]) * *f;
      if (sum_pi > std::numeric_limits<int64_t>::max()) ok = false;
    }
    for (size_t t = 0; t < rho.size() && ok; ++t) {
      double v = std::isfinite(rho[t]) && rho[t] < 0 ? rho[t] : 0.0;
      auto f = scaled_floor(static_cast<long double>(s.K), v);
      if (!f) { ok = false; break; }
      s.rho_int[t] = *f;
      sum_rho += *f;
      if (sum_rho < std::numeric_limits<int64_t>::min()) ok = false;
    }
    if (ok) return s;
    if (s.K <= 1) throw std::runtime_error("dual scaling underflow");
    s.K /= 2;
    if (s.K < s.M) s.M = s.K;
    ++s.halvings;
  }
}

Wide dual_objective_int(const ScaledDuals& s, std::span<const int64_t> demands) {
  Wide z = 0;
  for (size_t i = 0; i < s.pi_int.size(); ++i) z += static_cast<Wide>(demands[i]) * s.pi_int[i];
  for (int64_t r : s.rho_int) z += r;
  return z;
}

Wide reduced_cost_int(const ScaledDuals& s, std::span<const std::pair<int, int64_t>> items,
                      std::span<const int> cuts_hit) {
  Wide c = s.K;
  for (auto [row, count] : items) c -= static_cast<Wide>(count) * s.pi_int[row];
  for (int t : cuts_hit) c -= s.rho_int[t];
  return c;
}

Rational z_safe(Wide dual_objective_K, std::optional<Wide> min_reduced_cost_K, int64_t K) {
  if (min_reduced_cost_K && *min_reduced_cost_K < 0)
    return Rational(dual_objective_K, static_cast<Wide>(K) - *min_reduced_cost_K);
  return Rational(dual_objective_K, K);
}

}  // namespace csp
