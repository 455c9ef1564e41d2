#include "csp/instance.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace csp {

int64_t Instance::total_size() const {
  int64_t s = 0;
  for (const auto& it : items) s += it.size * it.demand;
  return s;
}

int64_t Instance::total_demand() const {
  int64_t s = 0;
  for (const auto& it : items) s += it.demand;
  return s;
}

Instance make_instance(int64_t roll_width, const std::vector<Item>& items) {
  using K = InstanceError::Kind;
  if (roll_width <= 0) throw InstanceError(K::NonPositive, "roll width must be positive");
  std::map<int64_t, int64_t, std::greater<>> grouped;
  for (const auto& it : items) {
    if (it.size <= 0 || it.demand <= 0)
      throw InstanceError(K::NonPositive, "item size and demand must be positive");
    if (it.size > roll_width)
      throw InstanceError(K::ItemExceedsCapacity,
                          "item size " + std::to_string(it.size) + " exceeds roll width " +
                              std::to_string(roll_width));
    grouped[it.size] += it.demand;
  }
  if (grouped.empty()) throw InstanceError(K::Malformed, "instance has no items");
  Instance inst;
  inst.roll_width = roll_width;
  for (auto [s, d] : grouped) inst.items.push_back({s, d});
  return inst;
}

namespace {

std::vector<std::string> split_tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

int64_t to_int(const std::string& tok) {
  size_t pos = 0;
  int64_t v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw InstanceError(InstanceError::Kind::Malformed, "not an integer: '" + tok + "'");
  }
  if (pos != tok.size())
    throw InstanceError(InstanceError::Kind::Malformed, "not an integer: '" + tok + "'");
  return v;
}

}  // namespace

InstanceFormat parse_format_name(const std::string& name) {
  if (name == "auto") return InstanceFormat::Auto;
  if (name == "bpp") return InstanceFormat::Bpp;
  if (name == "csp-pairs" || name == "csp") return InstanceFormat::CspPairs;
  throw InstanceError(InstanceError::Kind::Malformed, "unknown format '" + name + "'");
}

Instance parse_instance(std::istream& in, InstanceFormat format) {
  using K = InstanceError::Kind;
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_tokens(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  if (lines.empty()) throw InstanceError(K::Malformed, "empty instance");
  if (format == InstanceFormat::Auto) {
    if (lines[0].size() == 2) format = InstanceFormat::CspPairs;
    else if (lines[0].size() == 1) format = InstanceFormat::Bpp;
    else throw InstanceError(K::Malformed, "cannot detect format from first line");
  }

  std::vector<Item> items;
  int64_t W = 0;
  if (format == InstanceFormat::Bpp) {
    if (lines[0].size() != 1 || lines.size() < 2 || lines[1].size() != 1)
      throw InstanceError(K::Malformed, "bpp header must be n and W on separate lines");
    int64_t n = to_int(lines[0][0]);
    W = to_int(lines[1][0]);
    if (n <= 0 || W <= 0) throw InstanceError(K::NonPositive, "n and W must be positive");
    if (static_cast<int64_t>(lines.size()) - 2 != n)
      throw InstanceError(K::Malformed, "expected " + std::to_string(n) + " size lines, got " +
                                            std::to_string(lines.size() - 2));
    for (size_t i = 2; i < lines.size(); ++i) {
      if (lines[i].size() != 1) throw InstanceError(K::Malformed, "bpp size line must have one value");
      items.push_back({to_int(lines[i][0]), 1});
    }
  } else {
    if (lines[0].size() != 2) throw InstanceError(K::Malformed, "csp-pairs header must be 'n W'");
    int64_t n = to_int(lines[0][0]);
    W = to_int(lines[0][1]);
    if (n <= 0 || W <= 0) throw InstanceError(K::NonPositive, "n and W must be positive");
    if (static_cast<int64_t>(lines.size()) - 1 != n)
      throw InstanceError(K::Malformed, "expected " + std::to_string(n) + " item lines, got " +
                                            std::to_string(lines.size() - 1));
    for (size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].size() != 2) throw InstanceError(K::Malformed, "item line must be 'size demand'");
      items.push_back({to_int(lines[i][0]), to_int(lines[i][1])});
    }
  }
  return make_instance(W, items);
}

Instance parse_instance_string(const std::string& text, InstanceFormat format) {
  std::istringstream ss(text);
  return parse_instance(ss, format);
}

Instance read_instance_file(const std::filesystem::path& path, InstanceFormat format) {
  std::ifstream in(path);
  if (!in) throw InstanceError(InstanceError::Kind::Io, "cannot open " + path.string());
  Instance inst = parse_instance(in, format);
  auto side = path;
  side += ".json";
  if (std::filesystem::exists(side)) {
    std::ifstream pj(side);
    std::stringstream ss;
    ss << pj.rdbuf();
    inst.provenance = provenance_from_json(ss.str());
  }
  return inst;
}

void write_instance(std::ostream& out, const Instance& inst) {
  out << inst.items.size() << ' ' << inst.roll_width << '\n';
  for (const auto& it : inst.items) out << it.size << ' ' << it.demand << '\n';
}

std::string instance_to_string(const Instance& inst) {
  std::ostringstream ss;
  write_instance(ss, inst);
  return ss.str();
}

int64_t volume_bound(const Instance& inst) {
  const int64_t s = inst.total_size();
  return (s + inst.roll_width - 1) / inst.roll_width;
}

namespace {

// Unbiased draw from [lo, hi] using the raw 64-bit stream, so sequences do not
// depend on the standard library's distribution implementation.
int64_t draw(std::mt19937_64& rng, int64_t lo, int64_t hi) {
  const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(rng());
  const uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return lo + static_cast<int64_t>(x % span);
}

int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

}  // namespace

int64_t generated_item_count(const GeneratorSpec& spec) {
  int64_t n = 3 * spec.l;
  for (int i = 0; i < spec.k; ++i) n *= 3;
  return n;
}

Instance generate_benchmark(const GeneratorSpec& spec) {
  using K = InstanceError::Kind;
  if (spec.l < 3 || spec.l > 8) throw InstanceError(K::InvalidSpec, "l must be in [3,8]");
  if (spec.k < 1 || spec.k > 8) throw InstanceError(K::InvalidSpec, "k must be in [1,8]");
  if (spec.roll_width < 5) throw InstanceError(K::InvalidSpec, "W must be at least 5");
  if (spec.retry_limit < 1) throw InstanceError(K::InvalidSpec, "retry limit must be positive");

  const int64_t W = spec.roll_width;
  const int64_t lo = ceil_div(W, 5);
  const int64_t hi1 = 2 * W / 5;
  const int64_t two_fifths_up = ceil_div(2 * W, 5);
  std::mt19937_64 rng(spec.seed);
  std::multiset<int64_t> used;

  auto second_range_hi = [&](int64_t w1) { return std::max(lo, W - w1 - two_fifths_up); };

  // fixed_first < 0 means the first element is drawn too.
  auto make_triple = [&](int64_t fixed_first) {
    std::vector<int64_t> t;
    for (int attempt = 1;; ++attempt) {
      const int64_t w1 = fixed_first >= 0 ? fixed_first : draw(rng, lo, hi1);
      const int64_t w2 = draw(rng, lo, second_range_hi(w1));
      const int64_t w3 = W - w1 - w2;
      t = {w1, w2, w3};
      bool dup = w2 == w3 || used.count(w2) || used.count(w3);
      if (fixed_first < 0) dup = dup || w1 == w2 || w1 == w3 || used.count(w1);
      if (!dup || attempt >= spec.retry_limit) break;
    }
    if (fixed_first < 0) used.insert(t[0]);
    used.insert(t[1]);
    used.insert(t[2]);
    return t;
  };

  std::vector<std::vector<int64_t>> triples;
  for (int i = 0; i < spec.l; ++i) triples.push_back(make_triple(-1));
  for (int round = 0; round < spec.k; ++round) {
    std::vector<std::vector<int64_t>> next;
    next.reserve(triples.size() * 3);
    for (const auto& t : triples)
      for (int64_t w : t) next.push_back(make_triple(w));
    triples = std::move(next);
  }

  std::vector<Item> items;
  for (const auto& t : triples)
    for (int64_t w : t) items.push_back({w, 1});
  Instance inst = make_instance(W, items);
  inst.provenance = Provenance{spec, triples};
  return inst;
}

std::string provenance_to_json(const Provenance& p) {
  nlohmann::json j;
  j["l"] = p.spec.l;
  j["k"] = p.spec.k;
  j["W"] = p.spec.roll_width;
  j["seed"] = p.spec.seed;
  j["retry_limit"] = p.spec.retry_limit;
  j["rng"] = "mt19937_64";
  j["triples"] = p.triples;
  return j.dump(1);
}

Provenance provenance_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    Provenance p;
    p.spec.l = j.at("l").get<int>();
    p.spec.k = j.at("k").get<int>();
    p.spec.roll_width = j.at("W").get<int64_t>();
    p.spec.seed = j.at("seed").get<uint64_t>();
    p.spec.retry_limit = j.value("retry_limit", 100);
    p.triples = j.at("triples").get<std::vector<std::vector<int64_t>>>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InstanceError(InstanceError::Kind::Malformed, std::string("bad provenance: ") + e.what());
  }
}

}  // namespace csp
