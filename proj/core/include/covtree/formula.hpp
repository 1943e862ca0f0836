#pragma once

// Interaction formulas: negation-free boolean expressions over
// `option = value` / `option in {values}` atoms, with semantic
// canonicalization, equivalence checking, form classification, and a text
// grammar.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covtree/space.hpp"

namespace covtree {

class DecisionTree;

/// Raised when an equivalence/canonicalization projection exceeds the
/// enumeration cap.
class ProjectionTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value-type formula AST. Atoms carry an option index and a sorted, unique,
/// nonempty set of value indices. Negation is expressed by value-set
/// complement, so the AST needs only And/Or/True/False.
class Interaction {
 public:
  enum class Kind { True, False, Atom, And, Or };

  Interaction() : kind_(Kind::False) {}

  static Interaction make_true() { return Interaction(Kind::True); }
  static Interaction make_false() { return Interaction(Kind::False); }
  static Interaction atom(OptionIndex option, std::vector<ValueIndex> values);
  static Interaction conj(std::vector<Interaction> children);
  static Interaction disj(std::vector<Interaction> children);

  Kind kind() const noexcept { return kind_; }
  bool is_true() const noexcept { return kind_ == Kind::True; }
  bool is_false() const noexcept { return kind_ == Kind::False; }

  OptionIndex option() const { return option_; }
  const std::vector<ValueIndex>& values() const { return values_; }
  const std::vector<Interaction>& children() const { return children_; }

  bool evaluate(const Configuration& config) const;

  friend bool operator==(const Interaction&, const Interaction&) = default;

 private:
  explicit Interaction(Kind kind) : kind_(kind) {}

  Kind kind_;
  OptionIndex option_ = 0;
  std::vector<ValueIndex> values_;     // Atom
  std::vector<Interaction> children_;  // And / Or
};

enum class FormClass { Single, Conj, Disj, Mixed };

std::string_view to_string(FormClass form);

/// Sorted distinct option indices mentioned by the formula.
std::vector<OptionIndex> options_of(const Interaction& f);

/// Disjunction of hit-path conditions: OR over hit paths of the AND of their
/// settings. No hit path -> FALSE; an unconditional hit leaf -> TRUE.
Interaction from_tree(const DecisionTree& tree);

struct CanonicalizeResult {
  Interaction formula;
  // False when the projected space exceeded the cap (or a domain exceeds 64
  // values) and the input was returned unminimized.
  bool minimized = true;
};

inline constexpr std::uint64_t kProjectionCap = 1ull << 20;

/// Semantic canonicalization: truth-table the formula over its own options,
/// drop irrelevant ones, cover the minterms with merged prime implicants
/// (multi-valued Quine-McCluskey style), factor atoms common to all terms,
/// and order everything deterministically.
CanonicalizeResult canonicalize(const Interaction& f, const ConfigSpace& space);

/// Truth-table equality over the union of both formulas' options.
/// Throws ProjectionTooLarge above kProjectionCap assignments.
bool equivalent(const Interaction& f, const Interaction& g, const ConfigSpace& space);

/// Classification of canonical formulas:
///   single: TRUE/FALSE or one atom;
///   conj:   AND of single-value atoms;
///   disj:   OR of atoms (a k-value atom reads as k equalities under OR);
///   mixed:  everything else.
FormClass classify_form(const Interaction& f);

/// Number of distinct options in the formula; 0 for TRUE/FALSE.
std::size_t length(const Interaction& f);

/// Grammar: f := term ('|' term)*; term := factor ('&' factor)*;
/// factor := atom | '(' f ')' | 'true' | 'false';
/// atom := name '=' value | name 'in' '{' value (',' value)* '}'.
Interaction parse_formula(std::string_view text, const ConfigSpace& space);
std::string render_formula(const Interaction& f, const ConfigSpace& space);

/// True iff some configuration satisfies f (projected enumeration).
bool satisfiable(const Interaction& f, const ConfigSpace& space);

/// First satisfying configuration in lexicographic order of the projected
/// options, with every unconstrained option at its first domain value.
std::optional<Configuration> find_satisfying(const Interaction& f, const ConfigSpace& space);

/// Canonical minimal formula for an explicit predicate table over the whole
/// space, indexed by enumeration rank (see config_rank). The table size must
/// equal |space|.
Interaction exact_characterization(const ConfigSpace& space, const std::vector<bool>& table);

}  // namespace covtree
