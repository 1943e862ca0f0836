#pragma once

// Configuration-space model: named options with finite ordered value domains,
// total assignments over them, exhaustive enumeration, and seeded 1-way
// covering arrays.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace covtree {

using ValueIndex = std::uint16_t;
using OptionIndex = std::uint32_t;

/// Input-text error (space files, formulas, oracle databases). `line()` is
/// 1-based; 0 means "no line information".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct OptionDef {
  std::string name;
  std::vector<std::string> values;  // ordered domain; unique; size >= 2

  friend bool operator==(const OptionDef&, const OptionDef&) = default;
};

/// A total assignment, stored as one domain index per option in option order.
/// Value semantics; equality and ordering are componentwise.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<ValueIndex> values) : values_(std::move(values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  ValueIndex operator[](std::size_t option) const { return values_[option]; }
  void set(std::size_t option, ValueIndex value) { values_[option] = value; }
  const std::vector<ValueIndex>& values() const noexcept { return values_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;
  friend auto operator<=>(const Configuration&, const Configuration&) = default;

 private:
  std::vector<ValueIndex> values_;
};

struct ConfigurationHash {
  std::size_t operator()(const Configuration& c) const noexcept;
};

/// One `option = value` pair, by index into the owning space.
struct Setting {
  OptionIndex option = 0;
  ValueIndex value = 0;

  friend bool operator==(const Setting&, const Setting&) = default;
  friend auto operator<=>(const Setting&, const Setting&) = default;
};

class ConfigSpace {
 public:
  /// Throws std::invalid_argument on duplicate option names, duplicate
  /// values, or domains smaller than 2.
  explicit ConfigSpace(std::vector<OptionDef> options);

  std::size_t option_count() const noexcept { return options_.size(); }
  const OptionDef& option(std::size_t index) const { return options_.at(index); }
  const std::vector<OptionDef>& options() const noexcept { return options_; }
  std::size_t domain_size(std::size_t option) const { return options_.at(option).values.size(); }
  std::size_t max_domain_size() const;

  std::optional<OptionIndex> option_index(std::string_view name) const;
  std::optional<ValueIndex> value_index(std::size_t option, std::string_view token) const;

  /// Number of configurations; nullopt if the product overflows uint64.
  std::optional<std::uint64_t> exact_size() const noexcept;
  /// min(|space|, cap); safe against overflow.
  std::uint64_t size_capped(std::uint64_t cap) const noexcept;

  /// Space-file text that parses back to an equal space.
  std::string render() const;
  /// Stable hex digest of render(); identifies the space in result files.
  std::string fingerprint() const;

  /// "v1,v2,...,vn" in option order.
  std::string config_to_string(const Configuration& config) const;
  /// Inverse of config_to_string; throws ParseError on unknown values or
  /// wrong arity.
  Configuration config_from_string(std::string_view text) const;

  bool contains(const Configuration& config) const noexcept;

  friend bool operator==(const ConfigSpace&, const ConfigSpace&);

 private:
  std::vector<OptionDef> options_;
  std::unordered_map<std::string, OptionIndex> name_index_;
};

/// Parses the space-file grammar: one `name: v1,v2,...` per line, `#`
/// comments, whitespace ignored. Throws ParseError with a line number.
ConfigSpace parse_space(std::string_view text);

/// Seeded 1-way covering array: exactly max_domain_size(space) rows, every
/// value of every option present in at least one row.
std::vector<Configuration> one_way_covering(const ConfigSpace& space, std::uint64_t seed);

/// Streams all configurations in lexicographic order over domain indices
/// (first option most significant).
class ConfigEnumerator {
 public:
  explicit ConfigEnumerator(const ConfigSpace& space);
  std::optional<Configuration> next();

 private:
  const ConfigSpace* space_;
  std::vector<ValueIndex> digits_;
  bool done_;
};

void enumerate_all(const ConfigSpace& space,
                   const std::function<void(const Configuration&)>& fn);

/// Lexicographic rank of a configuration (the index enumerate_all would
/// assign it). Requires |space| to fit uint64.
std::uint64_t config_rank(const ConfigSpace& space, const Configuration& config);
Configuration config_at_rank(const ConfigSpace& space, std::uint64_t rank);

}  // namespace covtree
