#include <doctest.h>

#include "fixtures.hpp"
#include "qrw/session.hpp"

using namespace qrw;

namespace {

std::shared_ptr<const Registry> registry() {
  static auto reg = std::make_shared<const Registry>(defaultRegistry());
  return reg;
}

}  // namespace

TEST_CASE("apply then undo restores the previous term") {
  const DerivationDocument doc = parseDerivation(fixture("table1.deriv"));
  Session s(parseTerm(doc.initial), registry());
  const auto moves = s.moves();
  REQUIRE_FALSE(moves.empty());
  for (const RewriteStep& m : moves) {
    const Term before = s.current();
    s.apply(m);
    CHECK(s.stepCount() == 1);
    CHECK(s.undo());
    CHECK(s.current() == before);
  }
  CHECK_FALSE(s.undo());
}

TEST_CASE("a session retraces table 1 and exports a replayable derivation") {
  const DerivationDocument doc = parseDerivation(fixture("table1.deriv"));
  Session s(parseTerm(doc.initial), registry());
  for (const RewriteStep& step : doc.steps) s.apply(step);
  CHECK(s.current() == parseTerm(*doc.expect));
  const DerivationDocument out = s.derivation();
  CHECK(out.steps == doc.steps);
  CHECK(replay(parseTerm(out.initial), out.steps, *registry()) == s.current());
}

TEST_CASE("failed steps leave the session untouched") {
  Session s(parseTerm("V:x@a"), registry());
  CHECK_THROWS_AS(s.apply({"commuteV", Direction::Forward, {}}), NoMatch);
  CHECK(s.stepCount() == 0);
}

TEST_CASE("normalize appends undoable steps") {
  Session s(parseTerm(fixture("teleport.term")), registry());
  const std::size_t n = s.normalize();
  CHECK(n == s.stepCount());
  CHECK(s.normalize() == 0);
  while (s.undo()) {
  }
  CHECK(s.current() == s.initial());
}

TEST_CASE("normalize over budget changes nothing") {
  NormalizeConfig c;
  c.maxSteps = 3;
  Session s(parseTerm(fixture("teleport.term")), registry(), c);
  CHECK_THROWS_AS(s.normalize(), StepLimitExceeded);
  CHECK(s.stepCount() == 0);
}
