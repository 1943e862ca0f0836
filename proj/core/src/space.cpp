#include "covtree/space.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "rng.hpp"

namespace covtree {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s.front())) && s.front() != '_') return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::size_t ConfigurationHash::operator()(const Configuration& c) const noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (ValueIndex v : c.values()) {
    h ^= static_cast<std::uint64_t>(v) + 1;
    h *= 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

ConfigSpace::ConfigSpace(std::vector<OptionDef> options) : options_(std::move(options)) {
  for (std::size_t i = 0; i < options_.size(); ++i) {
    const OptionDef& opt = options_[i];
    if (opt.name.empty()) throw std::invalid_argument("option with empty name");
    if (opt.values.size() < 2)
      throw std::invalid_argument("option '" + opt.name + "' needs at least 2 values");
    std::unordered_set<std::string_view> seen;
    for (const std::string& v : opt.values) {
      if (v.empty()) throw std::invalid_argument("option '" + opt.name + "' has an empty value");
      if (!seen.insert(v).second)
        throw std::invalid_argument("option '" + opt.name + "' has duplicate value '" + v + "'");
    }
    if (!name_index_.emplace(opt.name, static_cast<OptionIndex>(i)).second)
      throw std::invalid_argument("duplicate option name '" + opt.name + "'");
  }
}

std::size_t ConfigSpace::max_domain_size() const {
  std::size_t m = 0;
  for (const OptionDef& opt : options_) m = std::max(m, opt.values.size());
  return m;
}

std::optional<OptionIndex> ConfigSpace::option_index(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ValueIndex> ConfigSpace::value_index(std::size_t option, std::string_view token) const {
  const auto& values = options_.at(option).values;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == token) return static_cast<ValueIndex>(i);
  }
  return std::nullopt;
}

std::optional<std::uint64_t> ConfigSpace::exact_size() const noexcept {
  std::uint64_t n = 1;
  for (const OptionDef& opt : options_) {
    const std::uint64_t k = opt.values.size();
    if (n > std::numeric_limits<std::uint64_t>::max() / k) return std::nullopt;
    n *= k;
  }
  return n;
}

std::uint64_t ConfigSpace::size_capped(std::uint64_t cap) const noexcept {
  std::uint64_t n = 1;
  for (const OptionDef& opt : options_) {
    const std::uint64_t k = opt.values.size();
    if (n >= cap || n > std::numeric_limits<std::uint64_t>::max() / k) return cap;
    n *= k;
  }
  return std::min(n, cap);
}

std::string ConfigSpace::render() const {
  std::string out;
  for (const OptionDef& opt : options_) {
    out += opt.name;
    out += ": ";
    for (std::size_t i = 0; i < opt.values.size(); ++i) {
      if (i) out += ',';
      out += opt.values[i];
    }
    out += '\n';
  }
  return out;
}

std::string ConfigSpace::fingerprint() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(detail::hash_str(render())));
  return buf;
}

std::string ConfigSpace::config_to_string(const Configuration& config) const {
  if (config.size() != options_.size())
    throw std::invalid_argument("configuration arity does not match space");
  std::string out;
  for (std::size_t i = 0; i < options_.size(); ++i) {
    if (i) out += ',';
    out += options_[i].values.at(config[i]);
  }
  return out;
}

Configuration ConfigSpace::config_from_string(std::string_view text) const {
  auto parts = split(text, ',');
  if (parts.size() != options_.size())
    throw ParseError("expected " + std::to_string(options_.size()) + " values, got " +
                     std::to_string(parts.size()));
  std::vector<ValueIndex> values(options_.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto token = trim(parts[i]);
    auto idx = value_index(i, token);
    if (!idx)
      throw ParseError("unknown value '" + std::string(token) + "' for option '" +
                       options_[i].name + "'");
    values[i] = *idx;
  }
  return Configuration(std::move(values));
}

bool ConfigSpace::contains(const Configuration& config) const noexcept {
  if (config.size() != options_.size()) return false;
  for (std::size_t i = 0; i < options_.size(); ++i) {
    if (config[i] >= options_[i].values.size()) return false;
  }
  return true;
}

bool operator==(const ConfigSpace& a, const ConfigSpace& b) { return a.options_ == b.options_; }

ConfigSpace parse_space(std::string_view text) {
  std::vector<OptionDef> options;
  std::unordered_set<std::string> names;
  int lineno = 0;
  for (std::string_view raw : split(text, '\n')) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::size_t colon = line.find(':');
    if (colon == std::string_view::npos)
      throw ParseError("expected 'name: v1,v2,...'", lineno);
    std::string name(trim(line.substr(0, colon)));
    if (!valid_name(name)) throw ParseError("invalid option name '" + name + "'", lineno);
    if (!names.insert(name).second)
      throw ParseError("duplicate option name '" + name + "'", lineno);
    std::string_view rest = trim(line.substr(colon + 1));
    if (rest.empty()) throw ParseError("option '" + name + "' has an empty domain", lineno);
    OptionDef def{std::move(name), {}};
    std::unordered_set<std::string> seen;
    for (std::string_view tok : split(rest, ',')) {
      std::string value(trim(tok));
      if (value.empty()) throw ParseError("empty value in domain of '" + def.name + "'", lineno);
      if (!seen.insert(value).second)
        throw ParseError("duplicate value '" + value + "' for option '" + def.name + "'", lineno);
      def.values.push_back(std::move(value));
    }
    if (def.values.size() < 2)
      throw ParseError("option '" + def.name + "' needs at least 2 values", lineno);
    options.push_back(std::move(def));
  }
  try {
    return ConfigSpace(std::move(options));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

std::vector<Configuration> one_way_covering(const ConfigSpace& space, std::uint64_t seed) {
  const std::size_t rows = space.max_domain_size();
  detail::Rng rng(seed);
  std::vector<Configuration> out(rows, Configuration(std::vector<ValueIndex>(space.option_count())));
  // Per option: a shuffled permutation of the domain fills the first k rows
  // (guaranteeing 1-coverage), remaining rows draw uniformly.
  for (std::size_t opt = 0; opt < space.option_count(); ++opt) {
    const std::size_t k = space.domain_size(opt);
    std::vector<ValueIndex> column(k);
    for (std::size_t v = 0; v < k; ++v) column[v] = static_cast<ValueIndex>(v);
    rng.shuffle(column);
    for (std::size_t row = 0; row < rows; ++row) {
      const ValueIndex v =
          row < k ? column[row] : static_cast<ValueIndex>(rng.below(k));
      out[row].set(opt, v);
    }
  }
  return out;
}

ConfigEnumerator::ConfigEnumerator(const ConfigSpace& space)
    : space_(&space), digits_(space.option_count(), 0), done_(false) {}

std::optional<Configuration> ConfigEnumerator::next() {
  if (done_) return std::nullopt;
  Configuration current(digits_);
  // Advance the mixed-radix counter, last option least significant.
  for (std::size_t i = digits_.size(); i-- > 0;) {
    if (++digits_[i] < space_->domain_size(i)) return current;
    digits_[i] = 0;
  }
  done_ = true;
  return current;
}

void enumerate_all(const ConfigSpace& space,
                   const std::function<void(const Configuration&)>& fn) {
  ConfigEnumerator it(space);
  while (auto c = it.next()) fn(*c);
}

std::uint64_t config_rank(const ConfigSpace& space, const Configuration& config) {
  std::uint64_t rank = 0;
  for (std::size_t i = 0; i < space.option_count(); ++i) {
    rank = rank * space.domain_size(i) + config[i];
  }
  return rank;
}

Configuration config_at_rank(const ConfigSpace& space, std::uint64_t rank) {
  std::vector<ValueIndex> values(space.option_count());
  for (std::size_t i = space.option_count(); i-- > 0;) {
    const std::uint64_t k = space.domain_size(i);
    values[i] = static_cast<ValueIndex>(rank % k);
    rank /= k;
  }
  return Configuration(std::move(values));
}

}  // namespace covtree
