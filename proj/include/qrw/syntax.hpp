#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrw/term.hpp"

namespace qrw {

/// Parses a ground term. Sort checking happens during the parse; errors
/// carry the span of the offending construct.
///
///   term    := symbol "(" term {"," term} ")" | const | numeric
///   const   := "V:" name ["#" tag] "@" space | "O:" name "@" space
///            | "S:" name
///   space   := label {"*" label}
///   numeric := e.g. `-1`, `1/2`, `1/sqrt2`, `i`, `1+2*i`
Term parseTerm(std::string_view input);

/// Same grammar, additionally accepting pattern variables (`S?a`, `V?v`,
/// `V?v@$s`, `O?o@$$s`) and space metavariables (`$s` binds one label,
/// `$$s` a whole space).
Term parsePattern(std::string_view input);

/// Unique text per term; parseTerm(renderCanonical(t)) == t.
std::string renderCanonical(const Term& t);

struct DiracSpan {
  Position position;
  std::size_t start;  // byte offsets into the rendered text
  std::size_t end;
};

struct DiracRendering {
  std::string text;
  std::vector<DiracSpan> spans;  // preorder, one per subterm
};

/// Output-only Dirac rendering with the extra-bracket convention: every
/// compound operand is parenthesised so each rendering names one term.
std::string renderDirac(const Term& t);
DiracRendering renderDiracWithSpans(const Term& t);

enum class Direction { Forward, Reverse };

std::string_view directionName(Direction d);  // "fwd" / "rev"

struct RewriteStep {
  std::string ruleId;
  Direction direction = Direction::Forward;
  Position position;

  friend bool operator==(const RewriteStep&, const RewriteStep&) = default;
};

/// Line-oriented, versioned derivation file:
///
///   qrewrite-derivation v1
///   initial: <term>
///   step: <ruleId> <fwd|rev> <position>
///   expect: <term>
///
/// Term texts are kept verbatim; rule ids are not resolved here.
struct DerivationDocument {
  int formatVersion = 1;
  std::string initial;
  std::vector<RewriteStep> steps;
  std::optional<std::string> expect;

  friend bool operator==(const DerivationDocument&,
                         const DerivationDocument&) = default;
};

DerivationDocument parseDerivation(std::string_view input);
std::string renderDerivation(const DerivationDocument& doc);

/// `rule <id>: <lhs> -> <rhs>` (one-directional) or `<->` (bidirectional).
struct RuleText {
  std::string id;
  std::string lhs;
  std::string rhs;
  bool bidirectional = false;
};
std::vector<RuleText> parseRuleFile(std::string_view input);

}  // namespace qrw
