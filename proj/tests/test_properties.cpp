// Randomized invariants at modest sizes; the acceptance binary runs the
// full-size versions.
#include <doctest.h>

#include "qrw/generate.hpp"
#include "qrw/interp.hpp"
#include "qrw/strategy.hpp"
#include "qrw/syntax.hpp"

using namespace qrw;

TEST_CASE("rewriting preserves sorts") {
  const Registry reg = defaultRegistry();
  TermGenerator gen(101);
  for (int i = 0; i < 100; ++i) {
    Term t = gen.any();
    const Sort sort = sortOf(t);
    for (int depth = 0; depth < 10; ++depth) {
      const auto moves = applicable(t, reg);
      if (moves.empty()) break;
      t = applyRule(t, moves[gen.rng()() % moves.size()], reg);
      REQUIRE(sortOf(t) == sort);
    }
  }
}

TEST_CASE("normalization preserves meaning, replays and is idempotent") {
  const Registry reg = defaultRegistry();
  TermGenerator gen(102);
  for (int i = 0; i < 60; ++i) {
    const Term t = gen.any();
    const NormalizeResult r = normalize(t, reg);
    CHECK(replay(t, r.derivation.steps, reg) == r.term);
    CHECK(normalize(r.term, reg).derivation.steps.empty());
    for (std::uint64_t k = 0; k < 3; ++k) {
      const Model m = randomModel({t, r.term}, i * 10 + k);
      CHECK(approxEqual(eval(t, m), eval(r.term, m)));
    }
  }
}

TEST_CASE("every derivation step preserves meaning") {
  const Registry reg = defaultRegistry();
  TermGenerator gen(103);
  for (int i = 0; i < 20; ++i) {
    const Term t = gen.any();
    const NormalizeResult r = normalize(t, reg);
    // gate rules introduce constants (h|1> mentions |0>), so the model
    // has to cover every intermediate term
    std::vector<Term> trace{t};
    for (const RewriteStep& s : r.derivation.steps) {
      trace.push_back(applyRule(trace.back(), s, reg));
    }
    const Model m = randomModel(trace, i);
    const ConcreteValue expected = eval(t, m);
    for (const Term& cur : trace) CHECK(approxEqual(eval(cur, m), expected));
  }
}

TEST_CASE("canonical text round-trips through the parser") {
  TermGenerator gen(104);
  for (int i = 0; i < 300; ++i) {
    const Term t = gen.any();
    CHECK(parseTerm(renderCanonical(t)) == t);
  }
}

TEST_CASE("truncated input always fails with an in-range span") {
  TermGenerator gen(105);
  for (int i = 0; i < 100; ++i) {
    const std::string text = renderCanonical(gen.any());
    const std::size_t cut = gen.rng()() % text.size();
    const std::string broken = text.substr(0, cut);
    try {
      parseTerm(broken);
    } catch (const ParseError& e) {
      CHECK(e.span().start <= e.span().end);
      CHECK(e.span().end <= broken.size());
    }
  }
}
