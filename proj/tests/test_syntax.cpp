#include <doctest.h>

#include "qrw/syntax.hpp"

using namespace qrw;

namespace {

const char* kRow1 =
    "apply(projector(V:alpha@a, V:alpha@a), timesV(1/sqrt2, plusV(V:beta@a, "
    "timesV(-1, V:gamma@a))))";

template <class E>
E captureError(std::string_view input) {
  try {
    parseTerm(input);
  } catch (const E& e) {
    return e;
  }
  FAIL("expected an error for " << input);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("canonical rendering round-trips") {
  for (const char* text :
       {kRow1, "S:alpha", "conjugate(ip(V:x@a*b, V:y@a*b))",
        "tensorO(O:cnot@a2*a, O:id@b)", "timesS(1+2*i, S:beta)",
        "V:plus#hadamard@a", "projector(V:0@a, V:1@a)"}) {
    const Term t = parseTerm(text);
    CHECK(renderCanonical(t) == text);
    CHECK(parseTerm(renderCanonical(t)) == t);
  }
}

TEST_CASE("whitespace is insignificant") {
  CHECK(parseTerm(" plusV( V:x@a ,V:y@a ) ") == parseTerm("plusV(V:x@a, V:y@a)"));
}

TEST_CASE("dirac rendering of the table 1 start term") {
  CHECK(renderDirac(parseTerm(kRow1)) ==
        "|alpha⟩_a⟨alpha|_a (1/√2 (|beta⟩_a + (-1 |gamma⟩_a)))");
}

TEST_CASE("dirac rendering of operators and inner products") {
  CHECK(renderDirac(parseTerm("ip(V:x@a, V:y@a)")) == "⟨x,y⟩");
  CHECK(renderDirac(parseTerm("apply(O:h@a, V:0@a)")) == "h\u0302_a (|0⟩_a)");
  CHECK(renderDirac(parseTerm("tensorV(V:x@a, V:y@b)")) == "|x⟩_a ⊗ |y⟩_b");
}

TEST_CASE("dirac spans cover each subterm") {
  const Term t = parseTerm(kRow1);
  const DiracRendering r = renderDiracWithSpans(t);
  const auto positions = positionsOf(t);
  REQUIRE(r.spans.size() == positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const DiracSpan& s = r.spans[i];
    CHECK(s.position == positions[i]);
    REQUIRE(s.start <= s.end);
    REQUIRE(s.end <= r.text.size());
    // A subterm's span lies inside its parent's.
    if (!s.position.isRoot()) {
      for (const DiracSpan& p : r.spans) {
        if (p.position == s.position.parent()) {
          CHECK(p.start <= s.start);
          CHECK(s.end <= p.end);
        }
      }
    }
    const Term& sub = subtermAt(t, s.position);
    // the second projector argument renders as a bra, not a ket
    const bool bra = !s.position.isRoot() && s.position.path.back() == 2 &&
                     subtermAt(t, s.position.parent()).isApp(Symbol::Projector);
    if ((sub.kind() == NodeKind::ConstVector && !bra) || s.position.isRoot()) {
      CHECK(r.text.substr(s.start, s.end - s.start) == renderDirac(sub));
    }
  }
}

TEST_CASE("parse errors carry spans") {
  const auto e = captureError<ParseError>("plusV(V:x@a, V:y@a");
  CHECK(e.span().start == 18);
  CHECK(e.span().end == 18);
  const auto bad = captureError<ParseError>("plusV(V:x@a, Q:y@a)");
  CHECK(bad.span().start == 13);
  const auto empty = captureError<ParseError>("");
  CHECK(empty.span().end == 0);
  const auto extra = captureError<ParseError>("ip(V:x@a, V:y@a, V:z@a)");
  CHECK(extra.span().start == 15);
  captureError<ParseError>("S:alpha trailing");
  captureError<ParseError>("V?v@a");  // variables only in patterns
}

TEST_CASE("sort errors carry the span of the offending application") {
  const std::string input = "plusV(V:x@a, ip(V:x@a, V:y@b))";
  const auto e = captureError<SortError>(input);
  REQUIRE(e.hasSpan());
  CHECK(input.substr(e.span().start, e.span().end - e.span().start) ==
        "ip(V:x@a, V:y@b)");
  CHECK(e.position() == "2");
}

TEST_CASE("patterns accept variables and space metavariables") {
  const Term p = parsePattern("apply(O:h@$s, V?v@$s)");
  CHECK_FALSE(p.isGround());
  CHECK(renderCanonical(p) == "apply(O:h@$s, V?v@$s)");
  CHECK(parsePattern("timesV(S?a, V?v)").arg(1).kind() == NodeKind::Variable);
}

TEST_CASE("derivation documents round-trip") {
  const std::string text =
      "qrewrite-derivation v1\n"
      "# comment\n"
      "initial: plusV(V:x@a, V:y@a)\n"
      "step: commuteV fwd eps\n"
      "step: commuteV rev 1.2\n"
      "expect: plusV(V:y@a, V:x@a)\n";
  const DerivationDocument doc = parseDerivation(text);
  CHECK(doc.initial == "plusV(V:x@a, V:y@a)");
  REQUIRE(doc.steps.size() == 2);
  CHECK(doc.steps[1].direction == Direction::Reverse);
  CHECK(doc.steps[1].position.toString() == "1.2");
  CHECK(doc.expect == "plusV(V:y@a, V:x@a)");
  CHECK(parseDerivation(renderDerivation(doc)) == doc);
}

TEST_CASE("malformed derivations report their line") {
  auto lineOf = [](const std::string& text) -> std::size_t {
    try {
      parseDerivation(text);
    } catch (const ParseError& e) {
      CHECK(e.span().end <= text.size());
      return e.line();
    }
    return 0;
  };
  CHECK(lineOf("qrewrite-derivation v2\n") == 1);
  CHECK(lineOf("qrewrite-derivation v1\ninitial: S:a\nstep: r sideways eps\n") == 3);
  CHECK(lineOf("qrewrite-derivation v1\ninitial: S:a\nstep: r fwd 0\n") == 3);
  CHECK(lineOf("qrewrite-derivation v1\nstep: r fwd eps\n") == 2);
}

TEST_CASE("rule files") {
  const auto rules = parseRuleFile(
      "# gates\n"
      "rule user.x0: apply(O:x@$s, V:0@$s) -> V:1@$s\n"
      "rule swap: plusV(V?a, V?b) <-> plusV(V?b, V?a)\n");
  REQUIRE(rules.size() == 2);
  CHECK(rules[0].id == "user.x0");
  CHECK_FALSE(rules[0].bidirectional);
  CHECK(rules[1].bidirectional);
  CHECK_THROWS_AS(parseRuleFile("rule nope apply -> x\n"), ParseError);
  CHECK_THROWS_AS(parseRuleFile("rule r: lhs\n"), ParseError);
}
