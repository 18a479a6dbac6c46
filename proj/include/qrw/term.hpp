#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrw/coefficient.hpp"
#include "qrw/errors.hpp"

namespace qrw {

/// Multiset of Hilbert-space labels, stored sorted.
class Space {
 public:
  Space() = default;
  explicit Space(std::vector<std::string> labels);
  static Space atom(std::string label) { return Space({std::move(label)}); }

  const std::vector<std::string>& labels() const { return labels_; }
  bool empty() const { return labels_.empty(); }
  std::size_t size() const { return labels_.size(); }
  bool hasDuplicates() const;

  /// `a*a2*b`
  std::string toString() const;

  friend bool operator==(const Space&, const Space&) = default;
  friend auto operator<=>(const Space&, const Space&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Sorted multiset union. Commutative and associative.
Space tensorSpace(const Space& lhs, const Space& rhs);

enum class SortKind { Scalar, Vector, Operator };

struct Sort {
  SortKind kind = SortKind::Scalar;
  Space space;  // empty for Scalar

  static Sort scalar() { return {}; }
  static Sort vector(Space s) { return {SortKind::Vector, std::move(s)}; }
  static Sort op(Space s) { return {SortKind::Operator, std::move(s)}; }

  /// `scalar`, `vector[a*b]`, `operator[a]`
  std::string toString() const;
  friend bool operator==(const Sort&, const Sort&) = default;
};

const char* kindName(SortKind kind);

enum class Symbol {
  Conjugate,
  PlusS,
  TimesS,
  PlusV,
  TimesV,
  PlusO,
  TimesO,
  Ip,
  Apply,
  Compose,
  Projector,
  TensorV,
  TensorO,
};

std::string_view symbolName(Symbol s);
std::optional<Symbol> symbolFromName(std::string_view name);
std::size_t arity(Symbol s);
SortKind resultKind(Symbol s);

/// 1-based argument path from the root. Empty is the root.
struct Position {
  std::vector<std::size_t> path;

  bool isRoot() const { return path.empty(); }
  Position child(std::size_t index) const;
  Position parent() const;
  /// True when `this` is a (non-strict) prefix of `other`.
  bool isPrefixOf(const Position& other) const;

  /// `eps` for the root, otherwise dotted (`2.1`).
  std::string toString() const;
  /// Accepts `eps`, dotted or comma separated indices. nullopt on error.
  static std::optional<Position> parse(std::string_view text);

  friend bool operator==(const Position&, const Position&) = default;
  friend auto operator<=>(const Position&, const Position&) = default;
};

enum class NodeKind {
  Variable,
  ScalarAtom,
  Numeric,
  ConstVector,
  ConstOperator,
  Application,
};

class Term;

namespace detail {
struct Node;
}

/// Immutable, structurally shared term. Ground applications are sort
/// checked on construction, so every ground Term that exists is well-sorted.
///
/// Labels on constants are kept in written order ("ports"): for operators
/// the order carries wiring (e.g. the control qubit of a CNOT). The Space
/// of a constant is the sorted multiset of its ports.
///
/// Inside rule patterns a port may be a space metavariable: `$s` binds a
/// single label, `$$s` binds a whole label sequence.
class Term {
 public:
  static Term variable(std::string name, SortKind kind,
                       std::vector<std::string> ports = {});
  static Term scalarAtom(std::string name);
  static Term numeric(Coefficient value);
  /// Names "0" and "1" default to the computational basis tag.
  static Term vector(std::string name, std::vector<std::string> ports,
                     std::optional<std::string> basis_tag = std::nullopt);
  static Term op(std::string name, std::vector<std::string> ports);
  /// Throws SortError (at the new root) when the arguments violate the
  /// signature, std::invalid_argument on an arity mismatch.
  static Term app(Symbol symbol, std::vector<Term> args);

  NodeKind kind() const;
  bool isApp(Symbol s) const;
  Symbol symbol() const;  // Application only
  const std::string& name() const;
  const std::string& basisTag() const;
  const std::vector<std::string>& ports() const;
  const Coefficient& value() const;  // Numeric only
  const std::vector<Term>& args() const;
  const Term& arg(std::size_t one_based) const;

  /// No variables and no space metavariables anywhere.
  bool isGround() const;
  SortKind sortKind() const;
  /// Known for ground terms; may be unknown inside patterns.
  const std::optional<Space>& space() const;
  /// Ground terms only.
  Sort sort() const;

  std::size_t nodeCount() const;
  std::size_t hash() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  explicit Term(std::shared_ptr<const detail::Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const detail::Node> node_;
};

inline bool isMetaLabel(std::string_view label) {
  return !label.empty() && label.front() == '$';
}

/// Sort of a ground term by structural recursion. Throws SortError naming
/// the offending position.
Sort sortOf(const Term& t);

/// Pattern-level sort: spaces may be unknown (nullopt) and metavariable
/// labels are treated as opaque names. Throws SortError on a definite
/// conflict.
struct PatternSort {
  SortKind kind;
  std::optional<Space> space;
};
PatternSort patternSortOf(const Term& t);

const Term& subtermAt(const Term& t, const Position& p);
bool isValidPosition(const Term& t, const Position& p);
/// Requires the replacement to have the same sort as the replaced subterm
/// when both are ground.
Term replaceAt(const Term& t, const Position& p, const Term& replacement);
/// Preorder, root first.
std::vector<Position> positionsOf(const Term& t);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

}  // namespace qrw
