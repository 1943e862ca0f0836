#include "covtree/formula.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "covtree/dtree.hpp"

namespace covtree {

namespace {

constexpr std::size_t kMaxMaskedDomain = 64;  // value sets are uint64 bitmasks
constexpr std::size_t kTermCap = 1u << 17;    // merge-level safety valve

void collect_options(const Interaction& f, std::vector<OptionIndex>& out) {
  switch (f.kind()) {
    case Interaction::Kind::Atom:
      out.push_back(f.option());
      break;
    case Interaction::Kind::And:
    case Interaction::Kind::Or:
      for (const Interaction& c : f.children()) collect_options(c, out);
      break;
    default:
      break;
  }
}

// A projected sub-space: the listed options with their domain sizes and
// mixed-radix strides (last option least significant).
struct Projection {
  std::vector<OptionIndex> options;
  std::vector<std::size_t> domain;
  std::vector<std::uint64_t> stride;
  std::uint64_t total = 1;
};

std::optional<Projection> make_projection(const ConfigSpace& space,
                                          std::vector<OptionIndex> options,
                                          std::uint64_t cap) {
  Projection p;
  p.options = std::move(options);
  p.domain.reserve(p.options.size());
  for (OptionIndex opt : p.options) {
    const std::uint64_t k = space.domain_size(opt);
    if (p.total > cap / k) return std::nullopt;
    p.total *= k;
    p.domain.push_back(k);
  }
  p.stride.assign(p.options.size(), 1);
  for (std::size_t i = p.options.size(); i-- > 1;) {
    p.stride[i - 1] = p.stride[i] * p.domain[i];
  }
  return p;
}

// Calls fn for every assignment of the projection, writing the projected
// values into `probe` (other options keep whatever probe holds).
template <typename Fn>
void for_each_projected(const Projection& p, Configuration& probe, Fn&& fn) {
  std::vector<ValueIndex> digits(p.options.size(), 0);
  for (std::size_t i = 0; i < p.options.size(); ++i) probe.set(p.options[i], 0);
  for (std::uint64_t idx = 0;; ++idx) {
    fn(idx, probe);
    std::size_t i = p.options.size();
    while (i-- > 0) {
      if (++digits[i] < p.domain[i]) {
        probe.set(p.options[i], digits[i]);
        break;
      }
      digits[i] = 0;
      probe.set(p.options[i], 0);
    }
    if (i == static_cast<std::size_t>(-1)) return;  // odometer wrapped
  }
}

Configuration zero_config(const ConfigSpace& space) {
  return Configuration(std::vector<ValueIndex>(space.option_count(), 0));
}

// ---- minimization ----------------------------------------------------------

// A product term: one value bitmask per projected option; a full-domain mask
// means the option is unconstrained in this term.
struct Term {
  std::vector<std::uint64_t> masks;
  friend bool operator==(const Term&, const Term&) = default;
};

struct TermHash {
  std::size_t operator()(const Term& t) const noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (std::uint64_t m : t.masks) {
      h ^= m;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Deterministic term order: first differing position, larger mask first.
bool term_less(const Term& a, const Term& b) {
  for (std::size_t i = 0; i < a.masks.size(); ++i) {
    if (a.masks[i] != b.masks[i]) return a.masks[i] > b.masks[i];
  }
  return false;
}

std::uint64_t full_mask(std::size_t k) {
  return k == 64 ? ~0ull : (1ull << k) - 1;
}

std::size_t term_atom_count(const Term& t, const std::vector<std::size_t>& domain) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.masks.size(); ++i) {
    if (t.masks[i] != full_mask(domain[i])) ++n;
  }
  return n;
}

std::vector<ValueIndex> mask_values(std::uint64_t mask) {
  std::vector<ValueIndex> out;
  for (ValueIndex v = 0; mask; ++v, mask >>= 1) {
    if (mask & 1) out.push_back(v);
  }
  return out;
}

// Generates prime implicants of the minterm set by iterated pairwise merging:
// two terms equal everywhere but one position merge into the union at that
// position. Terms that never take part in a merge are prime. If a level
// explodes past kTermCap the surviving frontier is used as-is (still a sound
// cover, possibly less minimal).
std::vector<Term> prime_implicants(std::vector<Term> minterms) {
  std::unordered_set<Term, TermHash> primes;
  std::vector<Term> current = std::move(minterms);
  const std::size_t width = current.empty() ? 0 : current.front().masks.size();
  while (!current.empty()) {
    std::unordered_set<Term, TermHash> next;
    std::vector<bool> merged(current.size(), false);
    for (std::size_t pos = 0; pos < width; ++pos) {
      // Bucket by the masks at every other position.
      std::unordered_map<Term, std::vector<std::size_t>, TermHash> buckets;
      for (std::size_t i = 0; i < current.size(); ++i) {
        Term key = current[i];
        key.masks[pos] = 0;
        buckets[std::move(key)].push_back(i);
      }
      for (const auto& [key, members] : buckets) {
        if (members.size() < 2) continue;
        for (std::size_t a = 0; a < members.size(); ++a) {
          for (std::size_t b = a + 1; b < members.size(); ++b) {
            Term m = current[members[a]];
            m.masks[pos] |= current[members[b]].masks[pos];
            merged[members[a]] = merged[members[b]] = true;
            next.insert(std::move(m));
          }
        }
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      if (!merged[i]) primes.insert(current[i]);
    }
    if (next.size() > kTermCap) {
      for (const Term& t : next) primes.insert(t);
      break;
    }
    current.assign(next.begin(), next.end());
  }
  std::vector<Term> out(primes.begin(), primes.end());
  std::sort(out.begin(), out.end(), term_less);
  return out;
}

// Greedy prime cover of the minterms: essential primes first, then most new
// coverage, ties by fewer atoms then term order; redundant picks pruned.
std::vector<Term> cover_minterms(const std::vector<Term>& primes,
                                 const std::vector<std::uint64_t>& minterm_idx,
                                 const Projection& p) {
  std::unordered_map<std::uint64_t, std::uint32_t> ordinal;
  ordinal.reserve(minterm_idx.size());
  for (std::uint32_t i = 0; i < minterm_idx.size(); ++i) ordinal.emplace(minterm_idx[i], i);

  // Minterm ordinals covered by each prime, by direct product enumeration.
  std::vector<std::vector<std::uint32_t>> covers(primes.size());
  for (std::size_t t = 0; t < primes.size(); ++t) {
    std::vector<std::vector<ValueIndex>> values(p.options.size());
    for (std::size_t i = 0; i < p.options.size(); ++i) {
      values[i] = mask_values(primes[t].masks[i]);
    }
    std::vector<std::size_t> digit(p.options.size(), 0);
    while (true) {
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < p.options.size(); ++i) {
        idx += static_cast<std::uint64_t>(values[i][digit[i]]) * p.stride[i];
      }
      covers[t].push_back(ordinal.at(idx));
      std::size_t i = p.options.size();
      while (i-- > 0) {
        if (++digit[i] < values[i].size()) break;
        digit[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }

  std::vector<std::uint32_t> cover_count(minterm_idx.size(), 0);
  for (const auto& c : covers) {
    for (std::uint32_t m : c) ++cover_count[m];
  }

  std::vector<bool> covered(minterm_idx.size(), false);
  std::size_t uncovered = minterm_idx.size();
  std::vector<bool> selected(primes.size(), false);
  auto take = [&](std::size_t t) {
    selected[t] = true;
    for (std::uint32_t m : covers[t]) {
      if (!covered[m]) {
        covered[m] = true;
        --uncovered;
      }
    }
  };

  // Essential primes: some minterm has a single cover.
  for (std::size_t t = 0; t < primes.size() && uncovered; ++t) {
    if (selected[t]) continue;
    bool essential = false;
    for (std::uint32_t m : covers[t]) {
      if (cover_count[m] == 1) {
        essential = true;
        break;
      }
    }
    if (essential) take(t);
  }

  while (uncovered) {
    std::size_t best = primes.size();
    std::size_t best_gain = 0;
    std::size_t best_atoms = 0;
    for (std::size_t t = 0; t < primes.size(); ++t) {
      if (selected[t]) continue;
      std::size_t gain = 0;
      for (std::uint32_t m : covers[t]) {
        if (!covered[m]) ++gain;
      }
      if (gain == 0) continue;
      const std::size_t atoms = term_atom_count(primes[t], p.domain);
      if (best == primes.size() || gain > best_gain ||
          (gain == best_gain && atoms < best_atoms)) {
        best = t;
        best_gain = gain;
        best_atoms = atoms;
      }
    }
    take(best);
  }

  // Drop picks made redundant by later ones.
  std::vector<std::uint32_t> times_covered(minterm_idx.size(), 0);
  for (std::size_t t = 0; t < primes.size(); ++t) {
    if (!selected[t]) continue;
    for (std::uint32_t m : covers[t]) ++times_covered[m];
  }
  for (std::size_t t = primes.size(); t-- > 0;) {
    if (!selected[t]) continue;
    bool redundant = true;
    for (std::uint32_t m : covers[t]) {
      if (times_covered[m] == 1) {
        redundant = false;
        break;
      }
    }
    if (redundant) {
      selected[t] = false;
      for (std::uint32_t m : covers[t]) --times_covered[m];
    }
  }

  std::vector<Term> out;
  for (std::size_t t = 0; t < primes.size(); ++t) {
    if (selected[t]) out.push_back(primes[t]);
  }
  std::sort(out.begin(), out.end(), term_less);
  return out;
}

struct TermAtom {
  OptionIndex option;
  std::uint64_t mask;
  friend bool operator==(const TermAtom&, const TermAtom&) = default;
};

std::vector<TermAtom> term_atoms(const Term& t, const Projection& p) {
  std::vector<TermAtom> out;
  for (std::size_t i = 0; i < t.masks.size(); ++i) {
    if (t.masks[i] != full_mask(p.domain[i])) out.push_back({p.options[i], t.masks[i]});
  }
  return out;
}

Interaction atoms_to_ast(const std::vector<TermAtom>& atoms) {
  std::vector<Interaction> parts;
  parts.reserve(atoms.size());
  for (const TermAtom& a : atoms) parts.push_back(Interaction::atom(a.option, mask_values(a.mask)));
  return Interaction::conj(std::move(parts));
}

// DNF cover -> formula: factor atoms common to every term out front, keep the
// residual disjunction, order everything deterministically.
Interaction terms_to_formula(const std::vector<Term>& terms, const Projection& p) {
  std::vector<std::vector<TermAtom>> atom_lists;
  atom_lists.reserve(terms.size());
  for (const Term& t : terms) atom_lists.push_back(term_atoms(t, p));

  std::vector<TermAtom> common = atom_lists.front();
  for (std::size_t i = 1; i < atom_lists.size() && !common.empty(); ++i) {
    std::vector<TermAtom> kept;
    for (const TermAtom& a : common) {
      if (std::find(atom_lists[i].begin(), atom_lists[i].end(), a) != atom_lists[i].end()) {
        kept.push_back(a);
      }
    }
    common = std::move(kept);
  }

  std::vector<Interaction> residual_terms;
  bool residual_true = false;
  for (const auto& atoms : atom_lists) {
    std::vector<TermAtom> rest;
    for (const TermAtom& a : atoms) {
      if (std::find(common.begin(), common.end(), a) == common.end()) rest.push_back(a);
    }
    if (rest.empty()) {
      residual_true = true;  // a term equal to the common part subsumes the rest
      break;
    }
    residual_terms.push_back(atoms_to_ast(rest));
  }

  std::vector<Interaction> parts;
  for (const TermAtom& a : common) parts.push_back(Interaction::atom(a.option, mask_values(a.mask)));
  if (!residual_true) parts.push_back(Interaction::disj(std::move(residual_terms)));
  return Interaction::conj(std::move(parts));
}

// Core minimizer: predicate table over the projected options (mixed-radix
// indexing). Reduces away irrelevant options, then builds a prime cover.
Interaction minimize_table(const ConfigSpace& space, Projection p, std::vector<bool> table) {
  std::uint64_t trues = 0;
  for (bool b : table) trues += b;
  if (trues == 0) return Interaction::make_false();
  if (trues == table.size()) return Interaction::make_true();

  // Drop options the table does not depend on.
  for (std::size_t i = 0; i < p.options.size();) {
    const std::size_t k = p.domain[i];
    const std::uint64_t stride = p.stride[i];
    bool relevant = false;
    for (std::uint64_t idx = 0; idx < p.total && !relevant; ++idx) {
      if ((idx / stride) % k != 0) continue;
      for (std::size_t v = 1; v < k; ++v) {
        if (table[idx] != table[idx + v * stride]) {
          relevant = true;
          break;
        }
      }
    }
    if (relevant) {
      ++i;
      continue;
    }
    std::vector<bool> reduced;
    reduced.reserve(p.total / k);
    for (std::uint64_t idx = 0; idx < p.total; ++idx) {
      if ((idx / stride) % k == 0) reduced.push_back(table[idx]);
    }
    table = std::move(reduced);
    p.options.erase(p.options.begin() + i);
    p.domain.erase(p.domain.begin() + i);
    p.total /= k;
    p.stride.assign(p.options.size(), 1);
    for (std::size_t j = p.options.size(); j-- > 1;) p.stride[j - 1] = p.stride[j] * p.domain[j];
  }

  if (p.options.empty()) return table[0] ? Interaction::make_true() : Interaction::make_false();
  if (p.total > kProjectionCap) {
    throw ProjectionTooLarge("projected space too large to minimize (" +
                             std::to_string(p.total) + " assignments)");
  }
  for (std::size_t k : p.domain) {
    if (k > kMaxMaskedDomain) {
      throw ProjectionTooLarge("option domain too large to minimize (" + std::to_string(k) +
                               " values)");
    }
  }

  std::vector<std::uint64_t> minterm_idx;
  std::vector<Term> minterms;
  for (std::uint64_t idx = 0; idx < p.total; ++idx) {
    if (!table[idx]) continue;
    minterm_idx.push_back(idx);
    Term t;
    t.masks.resize(p.options.size());
    for (std::size_t i = 0; i < p.options.size(); ++i) {
      t.masks[i] = 1ull << ((idx / p.stride[i]) % p.domain[i]);
    }
    minterms.push_back(std::move(t));
  }

  const std::vector<Term> primes = prime_implicants(std::move(minterms));
  const std::vector<Term> chosen = cover_minterms(primes, minterm_idx, p);
  return terms_to_formula(chosen, p);
}

}  // namespace

// ---- Interaction -----------------------------------------------------------

Interaction Interaction::atom(OptionIndex option, std::vector<ValueIndex> values) {
  if (values.empty()) throw std::invalid_argument("atom with empty value set");
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  Interaction f(Kind::Atom);
  f.option_ = option;
  f.values_ = std::move(values);
  return f;
}

Interaction Interaction::conj(std::vector<Interaction> children) {
  if (children.empty()) return make_true();
  if (children.size() == 1) return std::move(children.front());
  Interaction f(Kind::And);
  f.children_ = std::move(children);
  return f;
}

Interaction Interaction::disj(std::vector<Interaction> children) {
  if (children.empty()) return make_false();
  if (children.size() == 1) return std::move(children.front());
  Interaction f(Kind::Or);
  f.children_ = std::move(children);
  return f;
}

bool Interaction::evaluate(const Configuration& config) const {
  switch (kind_) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Atom:
      if (option_ >= config.size())
        throw std::invalid_argument("formula references option beyond configuration arity");
      return std::binary_search(values_.begin(), values_.end(), config[option_]);
    case Kind::And:
      for (const Interaction& c : children_) {
        if (!c.evaluate(config)) return false;
      }
      return true;
    case Kind::Or:
      for (const Interaction& c : children_) {
        if (c.evaluate(config)) return true;
      }
      return false;
  }
  return false;
}

std::string_view to_string(FormClass form) {
  switch (form) {
    case FormClass::Single:
      return "single";
    case FormClass::Conj:
      return "conj";
    case FormClass::Disj:
      return "disj";
    case FormClass::Mixed:
      return "mixed";
  }
  return "?";
}

std::vector<OptionIndex> options_of(const Interaction& f) {
  std::vector<OptionIndex> out;
  collect_options(f, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Interaction from_tree(const DecisionTree& tree) {
  std::vector<Interaction> hit_terms;
  for (const TreePath& path : tree.paths()) {
    if (!path.hit) continue;
    std::vector<Interaction> atoms;
    atoms.reserve(path.settings.size());
    for (const Setting& s : path.settings) {
      atoms.push_back(Interaction::atom(s.option, {s.value}));
    }
    hit_terms.push_back(Interaction::conj(std::move(atoms)));
  }
  return Interaction::disj(std::move(hit_terms));
}

CanonicalizeResult canonicalize(const Interaction& f, const ConfigSpace& space) {
  auto projection = make_projection(space, options_of(f), kProjectionCap);
  if (!projection) return {f, false};
  for (std::size_t k : projection->domain) {
    if (k > kMaxMaskedDomain) return {f, false};
  }
  std::vector<bool> table(projection->total);
  Configuration probe = zero_config(space);
  for_each_projected(*projection, probe,
                     [&](std::uint64_t idx, const Configuration& c) { table[idx] = f.evaluate(c); });
  return {minimize_table(space, std::move(*projection), std::move(table)), true};
}

bool equivalent(const Interaction& f, const Interaction& g, const ConfigSpace& space) {
  std::vector<OptionIndex> opts = options_of(f);
  for (OptionIndex o : options_of(g)) opts.push_back(o);
  std::sort(opts.begin(), opts.end());
  opts.erase(std::unique(opts.begin(), opts.end()), opts.end());
  auto projection = make_projection(space, std::move(opts), kProjectionCap);
  if (!projection) {
    throw ProjectionTooLarge("projected space too large for equivalence check");
  }
  bool equal = true;
  Configuration probe = zero_config(space);
  for_each_projected(*projection, probe, [&](std::uint64_t, const Configuration& c) {
    if (equal && f.evaluate(c) != g.evaluate(c)) equal = false;
  });
  return equal;
}

FormClass classify_form(const Interaction& f) {
  switch (f.kind()) {
    case Interaction::Kind::True:
    case Interaction::Kind::False:
    case Interaction::Kind::Atom:
      return FormClass::Single;
    case Interaction::Kind::And:
      for (const Interaction& c : f.children()) {
        if (c.kind() != Interaction::Kind::Atom || c.values().size() != 1) {
          return FormClass::Mixed;
        }
      }
      return FormClass::Conj;
    case Interaction::Kind::Or:
      // A k-value atom reads as k equalities, which stay pure under OR.
      for (const Interaction& c : f.children()) {
        if (c.kind() != Interaction::Kind::Atom) return FormClass::Mixed;
      }
      return FormClass::Disj;
  }
  return FormClass::Mixed;
}

std::size_t length(const Interaction& f) { return options_of(f).size(); }

// ---- text form --------------------------------------------------------------

namespace {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  static bool is_delim(char c) {
    return c == '=' || c == '&' || c == '|' || c == '(' || c == ')' || c == '{' || c == '}' ||
           c == ',' || std::isspace(static_cast<unsigned char>(c));
  }
  std::string token() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && !is_delim(text[pos])) ++pos;
    return std::string(text.substr(start, pos - start));
  }
  [[noreturn]] void fail(const std::string& message) {
    throw ParseError("formula position " + std::to_string(pos + 1) + ": " + message);
  }
};

Interaction parse_disjunction(Lexer& lex, const ConfigSpace& space);

Interaction parse_factor(Lexer& lex, const ConfigSpace& space) {
  if (lex.eat('(')) {
    Interaction f = parse_disjunction(lex, space);
    if (!lex.eat(')')) lex.fail("expected ')'");
    return f;
  }
  std::string name = lex.token();
  if (name.empty()) lex.fail("expected atom, 'true', 'false', or '('");
  if (name == "true") return Interaction::make_true();
  if (name == "false") return Interaction::make_false();
  auto opt = space.option_index(name);
  if (!opt) lex.fail("unknown option '" + name + "'");

  auto value_of = [&](const std::string& tok) -> ValueIndex {
    auto v = space.value_index(*opt, tok);
    if (!v) lex.fail("unknown value '" + tok + "' for option '" + name + "'");
    return *v;
  };

  if (lex.eat('=')) {
    std::string tok = lex.token();
    if (tok.empty()) lex.fail("expected value after '='");
    return Interaction::atom(*opt, {value_of(tok)});
  }
  std::string kw = lex.token();
  if (kw != "in") lex.fail("expected '=' or 'in' after option name");
  if (!lex.eat('{')) lex.fail("expected '{' after 'in'");
  std::vector<ValueIndex> values;
  do {
    std::string tok = lex.token();
    if (tok.empty()) lex.fail("expected value");
    values.push_back(value_of(tok));
  } while (lex.eat(','));
  if (!lex.eat('}')) lex.fail("expected '}'");
  if (values.size() == space.domain_size(*opt)) {
    // Full-domain atoms carry no constraint.
    std::vector<ValueIndex> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() == space.domain_size(*opt)) return Interaction::make_true();
  }
  return Interaction::atom(*opt, std::move(values));
}

Interaction parse_conjunction(Lexer& lex, const ConfigSpace& space) {
  std::vector<Interaction> factors;
  factors.push_back(parse_factor(lex, space));
  while (lex.eat('&')) factors.push_back(parse_factor(lex, space));
  return Interaction::conj(std::move(factors));
}

Interaction parse_disjunction(Lexer& lex, const ConfigSpace& space) {
  std::vector<Interaction> terms;
  terms.push_back(parse_conjunction(lex, space));
  while (lex.eat('|')) terms.push_back(parse_conjunction(lex, space));
  return Interaction::disj(std::move(terms));
}

void render_rec(const Interaction& f, const ConfigSpace& space, std::string& out, bool nested) {
  switch (f.kind()) {
    case Interaction::Kind::True:
      out += "true";
      return;
    case Interaction::Kind::False:
      out += "false";
      return;
    case Interaction::Kind::Atom: {
      const OptionDef& opt = space.option(f.option());
      out += opt.name;
      if (f.values().size() == 1) {
        out += '=';
        out += opt.values.at(f.values().front());
      } else {
        out += " in {";
        for (std::size_t i = 0; i < f.values().size(); ++i) {
          if (i) out += ',';
          out += opt.values.at(f.values()[i]);
        }
        out += '}';
      }
      return;
    }
    case Interaction::Kind::And:
    case Interaction::Kind::Or: {
      if (nested) out += '(';
      const char* sep = f.kind() == Interaction::Kind::And ? " & " : " | ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        render_rec(f.children()[i], space, out, true);
      }
      if (nested) out += ')';
      return;
    }
  }
}

}  // namespace

Interaction parse_formula(std::string_view text, const ConfigSpace& space) {
  Lexer lex{text};
  Interaction f = parse_disjunction(lex, space);
  if (!lex.at_end()) lex.fail("unexpected trailing input");
  return f;
}

std::string render_formula(const Interaction& f, const ConfigSpace& space) {
  std::string out;
  render_rec(f, space, out, false);
  return out;
}

bool satisfiable(const Interaction& f, const ConfigSpace& space) {
  return find_satisfying(f, space).has_value();
}

std::optional<Configuration> find_satisfying(const Interaction& f, const ConfigSpace& space) {
  auto projection = make_projection(space, options_of(f), kProjectionCap);
  if (!projection) throw ProjectionTooLarge("projected space too large for satisfiability");
  std::optional<Configuration> found;
  Configuration probe = zero_config(space);
  for_each_projected(*projection, probe, [&](std::uint64_t, const Configuration& c) {
    if (!found && f.evaluate(c)) found = c;
  });
  return found;
}

Interaction exact_characterization(const ConfigSpace& space, const std::vector<bool>& table) {
  auto size = space.exact_size();
  if (!size || *size != table.size()) {
    throw std::invalid_argument("predicate table size does not match |space|");
  }
  std::vector<OptionIndex> all(space.option_count());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<OptionIndex>(i);
  Projection p;
  p.options = std::move(all);
  p.domain.reserve(space.option_count());
  for (std::size_t i = 0; i < space.option_count(); ++i) p.domain.push_back(space.domain_size(i));
  p.stride.assign(space.option_count(), 1);
  for (std::size_t i = space.option_count(); i-- > 1;) p.stride[i - 1] = p.stride[i] * p.domain[i];
  p.total = *size;
  return minimize_table(space, std::move(p), table);
}

}  // namespace covtree
