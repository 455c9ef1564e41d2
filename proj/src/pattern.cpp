#include "csp/pattern.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace csp {

Pattern::Pattern(std::vector<PatternEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const PatternEntry& a, const PatternEntry& b) { return a.id < b.id; });
  for (const auto& e : entries) {
    if (e.count <= 0) continue;
    if (!entries_.empty() && entries_.back().id == e.id) {
      if (entries_.back().size != e.size) throw std::invalid_argument("pattern: inconsistent size");
      entries_.back().count += e.count;
    } else {
      entries_.push_back(e);
    }
  }
  uint64_t h = 1469598103934665603ull;
  for (const auto& e : entries_) {
    load_ += e.size * e.count;
    for (uint64_t v : {static_cast<uint64_t>(e.id), static_cast<uint64_t>(e.count)}) {
      h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
  }
  hash_ = static_cast<size_t>(h);
}

int64_t Pattern::count(ItemId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const PatternEntry& e, ItemId v) { return e.id < v; });
  return it != entries_.end() && it->id == id ? it->count : 0;
}

int64_t Pattern::copies() const {
  int64_t c = 0;
  for (const auto& e : entries_) c += e.count;
  return c;
}

std::vector<int64_t> Pattern::sizes() const {
  std::vector<int64_t> s;
  for (const auto& e : entries_)
    for (int64_t k = 0; k < e.count; ++k) s.push_back(e.size);
  std::sort(s.begin(), s.end(), std::greater<>());
  return s;
}

std::string Pattern::to_string() const {
  std::ostringstream ss;
  ss << '{';
  bool first = true;
  for (const auto& e : entries_) {
    if (!first) ss << ',';
    first = false;
    ss << e.size;
    if (e.count > 1) ss << 'x' << e.count;
  }
  ss << '}';
  return ss.str();
}

}  // namespace csp
