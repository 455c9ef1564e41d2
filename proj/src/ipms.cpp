#include "csp/ipms.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace csp {

int64_t Schedule::makespan() const {
  int64_t best = 0;
  for (const auto& m : machines) best = std::max(best, std::accumulate(m.begin(), m.end(), int64_t{0}));
  return best;
}

Schedule lpt(const std::vector<Item>& jobs, int64_t machines) {
  if (machines < 1) throw std::invalid_argument("lpt: machine count must be positive");
  std::vector<int64_t> times;
  for (const auto& j : jobs)
    for (int64_t k = 0; k < j.demand; ++k) times.push_back(j.size);
  std::sort(times.begin(), times.end(), std::greater<>());
  Schedule s;
  s.machines.resize(static_cast<size_t>(machines));
  std::vector<int64_t> load(s.machines.size(), 0);
  for (int64_t t : times) {
    size_t j = static_cast<size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    s.machines[j].push_back(t);
    load[j] += t;
  }
  return s;
}

int64_t ipms_lower_bound(const IpmsProblem& p) {
  int64_t total = 0, longest = 0;
  for (const auto& j : p.jobs) {
    total += j.size * j.demand;
    longest = std::max(longest, j.size);
  }
  return std::max((total + p.machines - 1) / p.machines, longest);
}

bool verify_schedule(const IpmsProblem& p, const Schedule& s) {
  if (static_cast<int64_t>(s.machines.size()) > p.machines) return false;
  std::map<int64_t, int64_t> need;
  for (const auto& j : p.jobs) need[j.size] += j.demand;
  for (const auto& m : s.machines)
    for (int64_t t : m) --need[t];
  return std::all_of(need.begin(), need.end(), [](auto& e) { return e.second == 0; });
}

namespace {

void validate(const IpmsProblem& p) {
  if (p.machines < 1) throw std::invalid_argument("ipms: machine count must be positive");
  if (p.jobs.empty()) throw std::invalid_argument("ipms: no jobs");
  for (const auto& j : p.jobs)
    if (j.size <= 0 || j.demand <= 0) throw std::invalid_argument("ipms: job times and counts must be positive");
}

struct TimeUp {};

class CspOracle {
 public:
  CspOracle(const IpmsProblem& p, const IpmsConfig& cfg, std::chrono::steady_clock::time_point start)
      : p_(p), cfg_(cfg), start_(start) {}

  std::optional<Schedule> operator()(int64_t capacity) {
    double left = cfg_.time_limit - std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    if (left <= 0) throw TimeUp{};
    SolveConfig sc = cfg_.solve;
    sc.time_limit = std::min(sc.time_limit, left);
    sc.cutoff = p_.machines + 1;
    sc.stop_at = p_.machines;
    sc.warm_bins.clear();
    for (const auto& col : pool_) {
      if (std::accumulate(col.begin(), col.end(), int64_t{0}) <= capacity) sc.warm_bins.push_back(col);
    }
    SolveResult r = solve_csp(make_instance(capacity, p_.jobs), sc);
    ++solves;
    nodes += r.stats.nodes;
    for (auto& col : r.root_columns) pool_.insert(col);
    if (r.value <= p_.machines && !r.incumbent.bins.empty()) {
      Schedule s;
      s.machines = r.incumbent.bins;
      s.machines.resize(static_cast<size_t>(p_.machines));
      return s;
    }
    if (r.status == SolveStatus::TimeLimit) throw TimeUp{};
    return std::nullopt;
  }

  int64_t solves = 0;
  int64_t nodes = 0;

 private:
  const IpmsProblem& p_;
  const IpmsConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  std::set<std::vector<int64_t>> pool_;
};

}  // namespace

void capacity_search(IpmsResult& res, const CapacityOracle& probe) {
  auto ask = [&](int64_t w, int stage) {
    auto s = probe(w);
    res.trace.push_back({w, s.has_value(), stage});
    if (s) {
      res.ub = w;
      res.schedule = std::move(*s);
    } else {
      res.lb = w + 1;
    }
    return s.has_value();
  };
  // stage 1: offsets 2^p - 1 above the lower bound
  for (int e = 0; res.lb < res.ub; ++e) {
    int64_t w = std::min(res.lb + (int64_t{1} << std::min(e, 62)) - 1, res.ub - 1);
    if (ask(w, 1)) break;
  }
  while (res.lb < res.ub) ask(res.lb + (res.ub - res.lb) / 2, 2);
}

IpmsResult ipms_solve(const IpmsProblem& p, const IpmsConfig& cfg) {
  validate(p);
  auto start = std::chrono::steady_clock::now();
  IpmsResult res;
  res.lb = ipms_lower_bound(p);
  res.schedule = lpt(p.jobs, p.machines);
  res.ub = res.schedule.makespan();

  CspOracle csp(p, cfg, start);
  try {
    capacity_search(res, cfg.oracle ? cfg.oracle : CapacityOracle(std::ref(csp)));
    res.optimal = true;
  } catch (const TimeUp&) {
  }
  res.csp_solves = csp.solves;
  res.nodes = csp.nodes;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace csp
