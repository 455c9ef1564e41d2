#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "csp/search.hpp"

namespace cli {

struct RunRecord {
  std::string instance;
  std::string status;
  int64_t value = 0;
  std::string bound;      // exact fraction
  int64_t bound_ceil = 0;
  double total_seconds = 0.0;
  double pricing_seconds = 0.0;
  double lp_seconds = 0.0;
  int64_t columns = 0;
  int64_t cuts = 0;
  int64_t nodes = 0;
  uint64_t seed = 0;
  csp::Features features;
};

RunRecord make_record(const std::string& name, const csp::SolveResult& r, const csp::SolveConfig& cfg);
nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
std::string summary_line(const RunRecord& r);

struct BatchRow {
  std::string dir;
  int64_t instances = 0;
  int64_t opt = 0;
  double mean_time = 0.0;
  double mean_columns = 0.0;
  double mean_cuts = 0.0;
  double mean_nodes = 0.0;
};

// Timed-out runs count at the time limit.
BatchRow aggregate(const std::string& dir, const std::vector<RunRecord>& runs, double time_limit);
std::string csv_header();
std::string csv_row(const BatchRow& row);

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cli
