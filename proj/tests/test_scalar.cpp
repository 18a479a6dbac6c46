#include <doctest.h>

#include "qrw/generate.hpp"
#include "qrw/interp.hpp"
#include "qrw/scalar.hpp"
#include "qrw/syntax.hpp"

using namespace qrw;

TEST_CASE("1/sqrt2 times 1/sqrt2 normalizes to exactly 1/2") {
  const Term t = normalizeScalar(parseTerm("timesS(1/sqrt2, 1/sqrt2)"));
  REQUIRE(t.kind() == NodeKind::Numeric);
  CHECK(t.value() == Coefficient::rational(Rational(1, 2)));
}

TEST_CASE("canonical scalar forms") {
  CHECK(renderCanonical(normalizeScalar(parseTerm("plusS(S:b, S:a)"))) ==
        "plusS(S:a, S:b)");
  CHECK(renderCanonical(normalizeScalar(parseTerm("plusS(S:a, timesS(-1, S:a))"))) ==
        "0");
  CHECK(renderCanonical(normalizeScalar(parseTerm("conjugate(timesS(i, S:a))"))) ==
        "timesS(-i, conjugate(S:a))");
  CHECK(renderCanonical(normalizeScalar(parseTerm("conjugate(conjugate(S:a))"))) ==
        "S:a");
}

TEST_CASE("scalar equality ignores bracketing and order") {
  CHECK(scalarEqual(parseTerm("timesS(S:a, plusS(S:b, 2))"),
                    parseTerm("plusS(timesS(2, S:a), timesS(S:b, S:a))")));
  CHECK_FALSE(scalarEqual(parseTerm("S:a"), parseTerm("conjugate(S:a)")));
}

TEST_CASE("scalar algebra laws on random scalars") {
  TermGenerator gen(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const Term a = gen.ofSort(SortKind::Scalar, {}, 3);
    const Term b = gen.ofSort(SortKind::Scalar, {}, 2);
    const Term c = gen.ofSort(SortKind::Scalar, {}, 2);
    const Term na = normalizeScalar(a);
    CHECK(normalizeScalar(na) == na);
    CHECK(scalarEqual(Term::app(Symbol::Conjugate,
                                {Term::app(Symbol::Conjugate, {a})}),
                      a));
    CHECK(scalarEqual(
        Term::app(Symbol::TimesS, {a, Term::app(Symbol::PlusS, {b, c})}),
        Term::app(Symbol::PlusS, {Term::app(Symbol::TimesS, {a, b}),
                                  Term::app(Symbol::TimesS, {a, c})})));
    CHECK(scalarEqual(
        Term::app(Symbol::Conjugate, {Term::app(Symbol::TimesS, {a, b})}),
        Term::app(Symbol::TimesS, {Term::app(Symbol::Conjugate, {a}),
                                   Term::app(Symbol::Conjugate, {b})})));
    // normalization keeps the value
    const Model m = randomModel(a, trial);
    CHECK(approxEqual(eval(a, m), eval(na, m)));
  }
}
