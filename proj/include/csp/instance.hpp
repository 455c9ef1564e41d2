#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace csp {

struct Item {
  int64_t size = 0;
  int64_t demand = 0;

  bool operator==(const Item&) const = default;
};

struct GeneratorSpec {
  int l = 3;
  int k = 1;
  int64_t roll_width = 100;
  uint64_t seed = 0;
  int retry_limit = 100;

  bool operator==(const GeneratorSpec&) const = default;
};

// Hidden optimal partition recorded by the generator.
struct Provenance {
  GeneratorSpec spec;
  std::vector<std::vector<int64_t>> triples;

  bool operator==(const Provenance&) const = default;
};

struct Instance {
  int64_t roll_width = 0;
  std::vector<Item> items;  // strictly decreasing sizes
  std::optional<Provenance> provenance;

  int64_t total_size() const;
  int64_t total_demand() const;
  bool operator==(const Instance& o) const {
    return roll_width == o.roll_width && items == o.items;
  }
};

enum class InstanceFormat { Auto, Bpp, CspPairs };

class InstanceError : public std::runtime_error {
 public:
  enum class Kind { Malformed, ItemExceedsCapacity, NonPositive, Io, InvalidSpec };
  InstanceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Groups equal sizes, sums demands, sorts by decreasing size and validates.
Instance make_instance(int64_t roll_width, const std::vector<Item>& items);

InstanceFormat parse_format_name(const std::string& name);
Instance parse_instance(std::istream& in, InstanceFormat format = InstanceFormat::Auto);
Instance parse_instance_string(const std::string& text, InstanceFormat format = InstanceFormat::Auto);
Instance read_instance_file(const std::filesystem::path& path,
                            InstanceFormat format = InstanceFormat::Auto);

// csp-pairs layout
void write_instance(std::ostream& out, const Instance& inst);
std::string instance_to_string(const Instance& inst);

int64_t volume_bound(const Instance& inst);

Instance generate_benchmark(const GeneratorSpec& spec);
int64_t generated_item_count(const GeneratorSpec& spec);

std::string provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const std::string& text);

}  // namespace csp
