#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace csp {

using ItemId = int64_t;

struct PatternEntry {
  ItemId id = 0;
  int64_t size = 0;
  int64_t count = 0;

  bool operator==(const PatternEntry&) const = default;
};

// Multiset of item copies; entries sorted by id, counts positive.
class Pattern {
 public:
  Pattern() = default;
  explicit Pattern(std::vector<PatternEntry> entries);

  const std::vector<PatternEntry>& entries() const { return entries_; }
  int64_t load() const { return load_; }
  int64_t waste(int64_t roll_width) const { return roll_width - load_; }
  int64_t count(ItemId id) const;
  int64_t copies() const;
  bool empty() const { return entries_.empty(); }
  size_t hash() const { return hash_; }
  // sizes of all copies, largest first
  std::vector<int64_t> sizes() const;
  std::string to_string() const;

  bool operator==(const Pattern& o) const { return hash_ == o.hash_ && entries_ == o.entries_; }
  auto operator<=>(const Pattern& o) const {
    return std::lexicographical_compare_three_way(
        entries_.begin(), entries_.end(), o.entries_.begin(), o.entries_.end(),
        [](const PatternEntry& a, const PatternEntry& b) {
          if (auto c = a.id <=> b.id; c != 0) return c;
          return a.count <=> b.count;
        });
  }

 private:
  std::vector<PatternEntry> entries_;
  int64_t load_ = 0;
  size_t hash_ = 0;
};

struct PatternHash {
  size_t operator()(const Pattern& p) const { return p.hash(); }
};

}  // namespace csp
