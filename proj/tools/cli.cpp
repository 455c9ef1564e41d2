#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "csp/instance.hpp"
#include "csp/ipms.hpp"

namespace fs = std::filesystem;

namespace cli {

RunRecord make_record(const std::string& name, const csp::SolveResult& r, const csp::SolveConfig& cfg) {
  RunRecord rec;
  rec.instance = name;
  rec.status = csp::to_string(r.status);
  rec.value = r.value;
  rec.bound = r.bound.to_string();
  rec.bound_ceil = static_cast<int64_t>(r.bound.ceil());
  rec.total_seconds = r.stats.total_seconds;
  rec.pricing_seconds = r.stats.pricing_seconds;
  rec.lp_seconds = r.stats.lp_seconds;
  rec.columns = r.stats.columns;
  rec.cuts = r.stats.cuts;
  rec.nodes = r.stats.nodes;
  rec.seed = cfg.seed;
  rec.features = cfg.features;
  return rec;
}

nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json j;
  j["instance"] = r.instance;
  j["status"] = r.status;
  j["value"] = r.value;
  j["bound"] = r.bound;
  j["bound_ceil"] = r.bound_ceil;
  j["time"] = {{"total", r.total_seconds}, {"pricing", r.pricing_seconds}, {"lp", r.lp_seconds}};
  j["columns"] = r.columns;
  j["cuts"] = r.cuts;
  j["nodes"] = r.nodes;
  j["seed"] = r.seed;
  nlohmann::json f = nlohmann::json::object();
  for (const auto& [name, member] : csp::feature_table()) f[name] = r.features.*member;
  j["features"] = f;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.instance = j.at("instance").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.value = j.at("value").get<int64_t>();
  r.bound = j.at("bound").get<std::string>();
  r.bound_ceil = j.at("bound_ceil").get<int64_t>();
  r.total_seconds = j.at("time").at("total").get<double>();
  r.pricing_seconds = j.at("time").at("pricing").get<double>();
  r.lp_seconds = j.at("time").at("lp").get<double>();
  r.columns = j.at("columns").get<int64_t>();
  r.cuts = j.at("cuts").get<int64_t>();
  r.nodes = j.at("nodes").get<int64_t>();
  r.seed = j.at("seed").get<uint64_t>();
  for (const auto& [name, member] : csp::feature_table()) r.features.*member = j.at("features").at(name).get<bool>();
  return r;
}

std::string summary_line(const RunRecord& r) {
  std::ostringstream os;
  os << r.status << ' ' << r.value << "  bound=" << r.bound << " time=" << std::fixed << std::setprecision(3)
     << r.total_seconds << "s cols=" << r.columns << " cuts=" << r.cuts << " nodes=" << r.nodes;
  return os.str();
}

BatchRow aggregate(const std::string& dir, const std::vector<RunRecord>& runs, double time_limit) {
  BatchRow row;
  row.dir = dir;
  row.instances = static_cast<int64_t>(runs.size());
  if (runs.empty()) return row;
  for (const auto& r : runs) {
    if (r.status == "Optimal") ++row.opt;
    row.mean_time += r.status == "TimeLimit" ? time_limit : r.total_seconds;
    row.mean_columns += static_cast<double>(r.columns);
    row.mean_cuts += static_cast<double>(r.cuts);
    row.mean_nodes += static_cast<double>(r.nodes);
  }
  double n = static_cast<double>(runs.size());
  row.mean_time /= n;
  row.mean_columns /= n;
  row.mean_cuts /= n;
  row.mean_nodes /= n;
  return row;
}

std::string csv_header() { return "dir,instances,opt,time,cols,cuts,nodes"; }

std::string csv_row(const BatchRow& row) {
  std::ostringstream os;
  os << row.dir << ',' << row.instances << ',' << row.opt << ',' << std::fixed << std::setprecision(3) << row.mean_time
     << ',' << std::setprecision(1) << row.mean_columns << ',' << row.mean_cuts << ',' << row.mean_nodes;
  return os.str();
}

namespace {

struct SolveFlags {
  double time_limit = 3600.0;
  uint64_t seed = 0;
  bool json = false;
  std::string format = "auto";
  std::map<std::string, bool> disabled;
};

void add_solve_flags(CLI::App* app, SolveFlags& f) {
  app->add_option("--time-limit", f.time_limit, "wall-clock limit in seconds")->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "random seed");
  app->add_flag("--json", f.json, "print a JSON record");
  app->add_option("--format", f.format, "instance format")->check(CLI::IsMember({"auto", "bpp", "csp-pairs", "csp"}));
  for (const auto& [name, member] : csp::feature_table()) {
    (void)member;
    f.disabled[name] = false;
    app->add_flag("--no-" + name, f.disabled[name], "disable " + name);
  }
}

csp::SolveConfig to_config(const SolveFlags& f) {
  csp::SolveConfig cfg;
  cfg.time_limit = f.time_limit;
  cfg.seed = f.seed;
  for (const auto& [name, member] : csp::feature_table()) cfg.features.*member = !f.disabled.at(name);
  return cfg;
}

int exit_code(const std::string& status) {
  if (status == "TimeLimit") return 2;
  if (status == "InfeasibleInput") return 1;
  return 0;
}

int cmd_solve(const std::string& path, const SolveFlags& f, std::ostream& out) {
  csp::Instance inst = csp::read_instance_file(path, csp::parse_format_name(f.format));
  csp::SolveConfig cfg = to_config(f);
  csp::SolveResult r = csp::solve_csp(inst, cfg);
  RunRecord rec = make_record(fs::path(path).filename().string(), r, cfg);
  if (f.json)
    out << to_json(rec).dump() << '\n';
  else
    out << summary_line(rec) << '\n';
  return exit_code(rec.status);
}

int cmd_gen(int l, int k, int64_t width, int count, uint64_t seed, const std::string& dir, std::ostream& out) {
  fs::create_directories(dir);
  for (int idx = 0; idx < count; ++idx) {
    csp::GeneratorSpec spec;
    spec.l = l;
    spec.k = k;
    spec.roll_width = width;
    spec.seed = seed + static_cast<uint64_t>(idx);
    csp::Instance inst = csp::generate_benchmark(spec);
    std::string stem = "csp_" + std::to_string(csp::generated_item_count(spec)) + "_" + std::to_string(width) + "_" +
                       std::to_string(idx);
    fs::path txt = fs::path(dir) / (stem + ".txt");
    std::ofstream os(txt);
    csp::write_instance(os, inst);
    std::ofstream(fs::path(dir) / (stem + ".txt.json")) << csp::provenance_to_json(*inst.provenance) << '\n';
    if (!os) throw std::runtime_error("cannot write " + txt.string());
    out << txt.string() << '\n';
  }
  return 0;
}

int cmd_ipms(const std::string& path, int64_t machines, const SolveFlags& f, std::ostream& out) {
  csp::Instance jobs = csp::read_instance_file(path, csp::parse_format_name(f.format));
  csp::IpmsProblem p{machines, jobs.items};
  csp::IpmsConfig cfg;
  cfg.solve = to_config(f);
  cfg.time_limit = f.time_limit;
  csp::IpmsResult r = csp::ipms_solve(p, cfg);
  std::string status = r.optimal ? "Optimal" : "TimeLimit";
  if (f.json) {
    nlohmann::json j;
    j["instance"] = fs::path(path).filename().string();
    j["status"] = status;
    j["makespan"] = r.ub;
    j["lower_bound"] = r.lb;
    j["machines"] = r.schedule.machines;
    j["csp_solves"] = r.csp_solves;
    j["nodes"] = r.nodes;
    j["time"] = r.seconds;
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace) trace.push_back({{"capacity", t.capacity}, {"feasible", t.feasible}, {"stage", t.stage}});
    j["trace"] = trace;
    out << j.dump() << '\n';
  } else {
    out << status << " makespan " << r.ub << "  lb=" << r.lb << " solves=" << r.csp_solves << '\n';
  }
  return r.optimal ? 0 : 2;
}

std::vector<fs::path> instance_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int cmd_batch(const std::string& dir, const SolveFlags& f, const std::string& records, std::ostream& out,
              std::ostream& err) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> dirs{dir};
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) dirs.push_back(e.path());
  std::sort(dirs.begin() + 1, dirs.end());
  std::ofstream rec_out;
  if (!records.empty()) rec_out.open(records);
  out << csv_header() << '\n';
  for (const auto& d : dirs) {
    auto files = instance_files(d);
    if (files.empty()) continue;
    std::vector<RunRecord> runs;
    for (const auto& file : files) {
      csp::SolveConfig cfg = to_config(f);
      csp::SolveResult r;
      try {
        r = csp::solve_csp(csp::read_instance_file(file, csp::parse_format_name(f.format)), cfg);
      } catch (const std::exception& e) {
        err << file.string() << ": " << e.what() << '\n';
        continue;
      }
      runs.push_back(make_record(file.filename().string(), r, cfg));
      if (rec_out) rec_out << to_json(runs.back()).dump() << '\n';
      if (f.json) err << summary_line(runs.back()) << "  " << file.filename().string() << '\n';
    }
    out << csv_row(aggregate(d.string(), runs, f.time_limit)) << '\n';
  }
  return 0;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cutting stock branch-cut-and-price solver"};
  app.require_subcommand(1);

  SolveFlags flags;
  std::string path;

  auto* solve = app.add_subcommand("solve", "solve one instance");
  solve->add_option("instance", path, "instance file")->required();
  add_solve_flags(solve, flags);

  int l = 0, k = 0, count = 0;
  int64_t width = 0;
  uint64_t gen_seed = 0;
  std::string gen_dir = ".";
  auto* gen = app.add_subcommand("gen", "generate benchmark instances with a known optimum");
  gen->add_option("l", l)->required();
  gen->add_option("k", k)->required();
  gen->add_option("W", width)->required();
  gen->add_option("count", count)->required()->check(CLI::NonNegativeNumber);
  gen->add_option("seed", gen_seed)->required();
  gen->add_option("-o,--out", gen_dir, "output directory");

  int64_t machines = 1;
  auto* ipms = app.add_subcommand("ipms", "minimize makespan on identical machines");
  ipms->add_option("jobs", path, "job file")->required();
  ipms->add_option("-m,--machines", machines, "machine count")->required()->check(CLI::PositiveNumber);
  add_solve_flags(ipms, flags);

  std::string records;
  auto* batch = app.add_subcommand("batch", "solve every .txt instance under a directory");
  batch->add_option("dir", path, "instance directory")->required();
  batch->add_option("--records", records, "write one JSON record per run to this file");
  add_solve_flags(batch, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*solve) return cmd_solve(path, flags, out);
    if (*gen) return cmd_gen(l, k, width, count, gen_seed, gen_dir, out);
    if (*ipms) return cmd_ipms(path, machines, flags, out);
    if (*batch) return cmd_batch(path, flags, records, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cli
