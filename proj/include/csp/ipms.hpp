#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "csp/instance.hpp"
#include "csp/search.hpp"

namespace csp {

struct IpmsProblem {
  int64_t machines = 1;
  std::vector<Item> jobs;  // size = processing time
};

// assignment[j] lists the job times on machine j
struct Schedule {
  std::vector<std::vector<int64_t>> machines;
  int64_t makespan() const;
};

Schedule lpt(const std::vector<Item>& jobs, int64_t machines);

// Volume and longest-job bound.
int64_t ipms_lower_bound(const IpmsProblem& p);

bool verify_schedule(const IpmsProblem& p, const Schedule& s);

struct IpmsProbe {
  int64_t capacity = 0;
  bool feasible = false;
  int stage = 1;
};

// Answers "do at most m bins of capacity W suffice"; a schedule on success.
using CapacityOracle = std::function<std::optional<Schedule>(int64_t capacity)>;

struct IpmsConfig {
  SolveConfig solve;
  double time_limit = 3600.0;
  // replaces the CSP decision solve, for tests
  CapacityOracle oracle;
};

struct IpmsResult {
  bool optimal = false;
  int64_t lb = 0;
  int64_t ub = 0;
  Schedule schedule;
  std::vector<IpmsProbe> trace;
  int64_t csp_solves = 0;
  int64_t nodes = 0;
  double seconds = 0.0;
};

// Two-stage search on [res.lb, res.ub]; res.ub must be achievable.
void capacity_search(IpmsResult& res, const CapacityOracle& probe);

IpmsResult ipms_solve(const IpmsProblem& p, const IpmsConfig& cfg = {});

}  // namespace csp
