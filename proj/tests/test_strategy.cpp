#include <doctest.h>

#include "fixtures.hpp"
#include "qrw/strategy.hpp"
#include "qrw/syntax.hpp"

using namespace qrw;

namespace {

const char* kRow9 =
    "timesV(timesS(1/sqrt2, plusS(ip(V:alpha@a, V:beta@a), timesS(-1, "
    "ip(V:alpha@a, V:gamma@a)))), V:alpha@a)";

}  // namespace

TEST_CASE("table 1 replays to row 9 exactly") {
  const DerivationDocument doc = parseDerivation(fixture("table1.deriv"));
  REQUIRE(doc.steps.size() == 8);
  const Term final_term = replay(parseTerm(doc.initial), doc.steps, defaultRegistry());
  CHECK(final_term == parseTerm(kRow9));
  CHECK(final_term == parseTerm(*doc.expect));
}

TEST_CASE("replay failures name the step") {
  DerivationDocument doc = parseDerivation(fixture("table1.deriv"));
  doc.steps[3].position = *Position::parse("2.2");
  try {
    replay(parseTerm(doc.initial), doc.steps, defaultRegistry());
    FAIL("replay should fail");
  } catch (const ReplayError& e) {
    CHECK(e.stepIndex() == 3);
  }
  const Term t = parseTerm(doc.initial);
  CHECK(replay(t, {}, defaultRegistry()) == t);
}

TEST_CASE("normalizing table 1 agrees with normalizing its last row") {
  const Registry reg = defaultRegistry();
  const Term row1 = parseTerm(parseDerivation(fixture("table1.deriv")).initial);
  const auto a = normalize(row1, reg);
  const auto b = normalize(parseTerm(kRow9), reg);
  CHECK(a.term == b.term);
  CHECK(replay(row1, a.derivation.steps, reg) == a.term);
}

TEST_CASE("teleportation normalizes to the published final state") {
  const Registry reg = defaultRegistry();
  const auto start = normalize(parseTerm(fixture("teleport.term")), reg);
  const auto published = normalize(parseTerm(fixture("teleport_final.term")), reg);
  CHECK(start.term == published.term);
  CHECK(start.derivation.steps.size() > 0);
  CHECK(replay(start.derivation.initial, start.derivation.steps, reg) == start.term);
  MESSAGE("teleportation derivation: " << start.derivation.steps.size() << " steps");
}

TEST_CASE("canonical input takes no steps") {
  const Registry reg = defaultRegistry();
  const Term v = parseTerm("V:v@a");
  CHECK(normalize(v, reg).derivation.steps.empty());
  const auto once = normalize(parseTerm(fixture("teleport.term")), reg);
  const auto twice = normalize(once.term, reg);
  CHECK(twice.term == once.term);
  CHECK(twice.derivation.steps.empty());
}

TEST_CASE("like summands merge and cancelled summands disappear") {
  const Registry reg = defaultRegistry();
  CHECK(renderCanonical(normalize(parseTerm("plusV(V:x@a, V:x@a)"), reg).term) ==
        "timesV(2, V:x@a)");
  CHECK(renderCanonical(
            normalize(parseTerm("plusV(V:y@a, plusV(V:x@a, timesV(-1, V:y@a)))"), reg)
                .term) == "V:x@a");
  CHECK(renderCanonical(
            normalize(parseTerm("plusV(V:x@a, timesV(-1, V:x@a))"), reg).term) ==
        "timesV(0, V:x@a)");
}

TEST_CASE("tensor factors are ordered by space") {
  const Registry reg = defaultRegistry();
  CHECK(renderCanonical(normalize(parseTerm("tensorV(V:y@b, tensorV(V:z@c, V:x@a))"),
                                  reg)
                            .term) == "tensorV(V:x@a, tensorV(V:y@b, V:z@c))");
}

TEST_CASE("the step budget is enforced") {
  NormalizeConfig c;
  c.maxSteps = 1;
  CHECK_THROWS_AS(normalize(parseTerm(fixture("teleport.term")), defaultRegistry(), c),
                  StepLimitExceeded);
}

TEST_CASE("normalization is deterministic") {
  const Registry reg = defaultRegistry();
  const Term t = parseTerm(fixture("teleport.term"));
  const auto a = normalize(t, reg);
  const auto b = normalize(t, reg);
  CHECK(a.term == b.term);
  CHECK(a.derivation.steps == b.derivation.steps);
}

TEST_CASE("equivalence of the two bracketings") {
  const Registry reg = defaultRegistry();
  const Term lhs = parseTerm("apply(projector(V:phi@a, V:phi@a), V:alpha@a)");
  CHECK(equivalent(lhs, parseTerm("timesV(ip(V:phi@a, V:alpha@a), V:phi@a)"), reg));
  CHECK_FALSE(equivalent(lhs, parseTerm("timesV(ip(V:phi@a, V:phi@a), V:alpha@a)"), reg));
  CHECK(equivalent(lhs, lhs, reg));
  CHECK_THROWS_AS(equivalent(lhs, parseTerm("V:x@b"), reg), SortError);
}

TEST_CASE("optional rules join normalization only when enabled") {
  const Registry reg = defaultRegistry();
  const Term t = parseTerm("conjugate(ip(V:x@a, V:y@a))");
  CHECK(normalize(t, reg).term == t);
  NormalizeConfig c;
  c.optionalRules = {"ip.conjugateSymmetry"};
  const auto r = normalize(t, reg, c);
  CHECK(renderCanonical(r.term) == "ip(V:y@a, V:x@a)");
  CHECK(replay(t, r.derivation.steps, effectiveRegistry(reg, c)) == r.term);
}

TEST_CASE("user rules can be switched off") {
  NormalizeConfig c;
  c.applyUserRules = false;
  const Term t = parseTerm("apply(O:h@a, V:0@a)");
  CHECK(normalize(t, defaultRegistry(), c).term == t);
  CHECK(normalize(t, defaultRegistry()).term != t);
}
