#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qrw/syntax.hpp"
#include "qrw/term.hpp"

namespace qrw {

enum class RuleKind {
  Builtin,   // the 34-rule catalogue
  User,      // registered schemata (qubit gates, --rules files)
  Optional,  // catalogued but off unless enabled
  Support,   // scalar-layer rules that every registry carries
};

struct Rule {
  std::string id;
  Term lhs;
  Term rhs;
  bool bidirectional = true;
  RuleKind kind = RuleKind::Builtin;
  /// Human-readable family, e.g. "inner product sesquilinearity".
  std::string group;
};

/// Bindings produced by matching a pattern against a ground term.
struct Match {
  std::map<std::string, Term> terms;
  std::map<std::string, std::vector<std::string>> spaces;
};

/// Root-level syntactic match (no AC). A bound space metavariable must
/// agree exactly across occurrences; repeated term variables must bind
/// structurally equal subterms.
std::optional<Match> match(const Term& pattern, const Term& t);

/// Throws SortError if the instance is ill-sorted and std::out_of_range on
/// an unbound variable.
Term instantiate(const Term& pattern, const Match& bindings);

/// Id of the rule that rewrites any scalar subterm to its canonical form.
inline constexpr const char* kScalarNormalize = "scalar.normalize";

/// Immutable-after-build rule set, ordered by rule id.
class Registry {
 public:
  /// Number of non-support rules (support rules are always present).
  std::size_t size() const;
  const Rule* find(const std::string& id) const;
  /// All rules (support included), by id.
  std::vector<const Rule*> rules() const;
  std::vector<const Rule*> rulesOfKind(RuleKind kind) const;

  /// Optional rules are known but disabled until enabled.
  bool isEnabled(const Rule& rule) const;
  Registry withOptional(const std::string& id) const;

  /// Validates and adds; throws IllFormedRule.
  void add(Rule rule);

 private:
  std::map<std::string, std::shared_ptr<const Rule>> rules_;
  std::set<std::string> enabled_optional_;
};

/// Builds a rule from pattern text and validates it.
Rule makeRule(const std::string& id, const std::string& lhs,
              const std::string& rhs, bool bidirectional, RuleKind kind,
              const std::string& group = {});

/// Throws IllFormedRule when variables are inconsistent, the RHS of a
/// one-directional rule (or either side of a bidirectional one) has
/// variables missing from the other side, or the two sides cannot share
/// a sort.
void validateRule(const Rule& rule);

/// The 34 catalogue rules plus support rules; `ip.conjugateSymmetry` is
/// known but disabled.
Registry builtinRegistry();

/// Hadamard, CNOT and identity schemata over qubit spaces.
std::vector<Rule> qubitRules();

Registry registerUserRules(Registry registry, const std::vector<Rule>& rules);

/// Rules from a `rule <id>: lhs -> rhs` file, as user rules.
std::vector<Rule> loadRuleFile(std::string_view text);

/// Builtin catalogue with the shipped qubit rules registered.
Registry defaultRegistry();

/// The term a step would produce, or nullopt if it does not apply.
std::optional<Term> tryApplyRule(const Term& t, const RewriteStep& step,
                                 const Registry& registry);

/// Throws UnknownRule, InvalidPosition, DirectionNotAllowed or NoMatch.
Term applyRule(const Term& t, const RewriteStep& step,
               const Registry& registry);

/// Every applicable step: position preorder, then rule id, then forward
/// before reverse. Reverse support steps are not listed.
std::vector<RewriteStep> applicable(const Term& t, const Registry& registry);

}  // namespace qrw
