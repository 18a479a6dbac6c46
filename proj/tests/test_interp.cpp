#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "qrw/generate.hpp"
#include "qrw/interp.hpp"
#include "qrw/strategy.hpp"
#include "qrw/syntax.hpp"

using namespace qrw;

namespace {

// Dense three-qubit statevector in (a2, a, b) order, written out directly:
// |psi> (x) Bell, then CNOT(a2 -> a), then H on a2.
Eigen::VectorXcd teleportBySimulation(Complex alpha, Complex beta) {
  Eigen::VectorXcd psi(2), bell(4);
  psi << alpha, beta;
  const double s = 1 / std::sqrt(2.0);
  bell << s, 0, 0, s;
  Eigen::VectorXcd state(8);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 4; ++j) state(i * 4 + j) = psi(i) * bell(j);
  }
  Eigen::MatrixXcd cnot = Eigen::MatrixXcd::Zero(8, 8);
  for (int a2 = 0; a2 < 2; ++a2) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        cnot((a2 * 4) + ((a ^ a2) * 2) + b, a2 * 4 + a * 2 + b) = 1;
      }
    }
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(8, 8);
  for (int a2 = 0; a2 < 2; ++a2) {
    for (int out = 0; out < 2; ++out) {
      for (int rest = 0; rest < 4; ++rest) {
        h(out * 4 + rest, a2 * 4 + rest) = (a2 == 1 && out == 1) ? -s : s;
      }
    }
  }
  return h * (cnot * state);
}

// Reorders an (a, a2, b) coordinate vector to (a2, a, b).
Eigen::VectorXcd toCircuitOrder(const Eigen::VectorXcd& sorted) {
  Eigen::VectorXcd out(8);
  for (int a = 0; a < 2; ++a) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int b = 0; b < 2; ++b) out(a2 * 4 + a * 2 + b) = sorted(a * 4 + a2 * 2 + b);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("projector application matches its right-hand side") {
  const Term lhs = parseTerm("apply(projector(V:psi@a, V:phi@a), V:theta@a)");
  const Term rhs = parseTerm("timesV(ip(V:phi@a, V:theta@a), V:psi@a)");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Model m = randomModel({lhs, rhs}, seed);
    CHECK(approxEqual(eval(lhs, m), eval(rhs, m)));
  }
}

TEST_CASE("inner products of a vector with itself are real and non-negative") {
  const Term t = parseTerm("ip(V:v@a*b, V:v@a*b)");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Complex z = eval(t, randomModel(t, seed)).scalar;
    CHECK(std::abs(z.imag()) < 1e-12);
    CHECK(z.real() >= 0);
  }
}

TEST_CASE("inner products are conjugate-linear in the first argument") {
  const Term lhs = parseTerm("ip(timesV(i, V:x@a), V:y@a)");
  const Term rhs = parseTerm("timesS(-i, ip(V:x@a, V:y@a))");
  const Model m = randomModel({lhs, rhs}, 3);
  CHECK(approxEqual(eval(lhs, m), eval(rhs, m)));
}

TEST_CASE("random models are deterministic and use small dimensions") {
  const Term t = parseTerm("tensorV(V:x@a, tensorV(V:0@b, V:y@c))");
  const Model m1 = randomModel(t, 9);
  const Model m2 = randomModel(t, 9);
  CHECK(m1.dims == m2.dims);
  CHECK(m1.vectors.at("V:x@a") == m2.vectors.at("V:x@a"));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Model m = randomModel(t, seed);
    for (const auto& [label, d] : m.dims) CHECK((d == 2 || d == 3));
    const Eigen::VectorXcd zero = m.vectors.at("V:0@b");
    CHECK(zero(0) == Complex(1));
    CHECK(zero.norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("evaluation respects sorts") {
  TermGenerator gen(5);
  for (int i = 0; i < 200; ++i) {
    const Term t = gen.any();
    const Model m = randomModel(t, i);
    const ConcreteValue v = eval(t, m);
    const Sort s = t.sort();
    CHECK(v.kind == s.kind);
    if (s.kind == SortKind::Vector) CHECK(v.vector.size() == m.dimension(s.space));
    if (s.kind == SortKind::Operator) CHECK(v.matrix.rows() == m.dimension(s.space));
  }
}

TEST_CASE("tensor products commute under label-ordered evaluation") {
  const Term ab = parseTerm("tensorV(V:x@a, V:y@b)");
  const Term ba = parseTerm("tensorV(V:y@b, V:x@a)");
  const Model m = randomModel({ab, ba}, 4);
  CHECK(approxEqual(eval(ab, m), eval(ba, m)));
}

TEST_CASE("apply is linear") {
  TermGenerator gen(6);
  for (int i = 0; i < 100; ++i) {
    const Space s = gen.randomSpace(2);
    const Term o = gen.ofSort(SortKind::Operator, s, 2);
    const Term v = gen.ofSort(SortKind::Vector, s, 2);
    const Term w = gen.ofSort(SortKind::Vector, s, 2);
    const Term lhs = Term::app(Symbol::Apply, {o, Term::app(Symbol::PlusV, {v, w})});
    const Term rhs = Term::app(Symbol::PlusV, {Term::app(Symbol::Apply, {o, v}),
                                               Term::app(Symbol::Apply, {o, w})});
    const Model m = randomModel({lhs, rhs}, i);
    CHECK(approxEqual(eval(lhs, m), eval(rhs, m)));
  }
}

TEST_CASE("teleportation agrees with a dense eight-dimensional simulation") {
  const Registry reg = defaultRegistry();
  const Term start = parseTerm(fixture("teleport.term"));
  const Term final_term = normalize(start, reg).term;
  const Term paper = parseTerm(fixture("teleport_final.term"));
  const std::map<std::string, int> qubits{{"a", 2}, {"a2", 2}, {"b", 2}};
  const std::vector<std::pair<Complex, Complex>> amplitudes{
      {1, 0}, {0, 1}, {Complex(0.6, 0.1), Complex(-0.2, 0.7)}};
  for (const auto& [alpha, beta] : amplitudes) {
    Model m = randomModel({start, paper}, 1, qubits);
    m.scalars["alpha"] = alpha;
    m.scalars["beta"] = beta;
    const Eigen::VectorXcd expected = teleportBySimulation(alpha, beta);
    for (const Term& t : {start, final_term, paper}) {
      const ConcreteValue v = eval(t, m);
      REQUIRE(v.vector.size() == 8);
      CHECK((toCircuitOrder(v.vector) - expected).norm() < 1e-12);
    }
  }
}

TEST_CASE("unassigned constants are reported") {
  const Model m = randomModel(parseTerm("V:x@a"), 1);
  CHECK_THROWS_AS(eval(parseTerm("V:y@a"), m), UnassignedConstant);
  CHECK_THROWS_AS(eval(parseTerm("S:beta"), m), UnassignedConstant);
}

TEST_CASE("soundness reports and mutation controls") {
  const Registry reg = defaultRegistry();
  CHECK(checkRuleSoundness("applyProjector", reg, 30, 1).ok());
  CHECK(checkRuleSoundness("commuteTV", reg, 30, 1).ok());
  CHECK(checkRuleSoundness("user.cnot10", reg, 30, 1).ok());
  for (const auto& id : mutationTargets()) {
    const SoundnessReport r = checkRuleSoundness(mutatedRule(*reg.find(id)), 30, 1);
    CHECK_FALSE(r.ok());
    REQUIRE(r.counterexample);
    CHECK_FALSE(r.counterexample->lhs.empty());
  }
  CHECK_THROWS_AS(mutatedRule(*reg.find("commuteV")), UnknownRule);
  CHECK_THROWS_AS(checkRuleSoundness("missing", reg, 1, 1), UnknownRule);
  const auto a = checkRuleSoundness("tensor.ip", reg, 20, 5);
  const auto b = checkRuleSoundness("tensor.ip", reg, 20, 5);
  CHECK(a.passed == b.passed);
  CHECK(renderSoundnessText({a}).find("tensor.ip") != std::string::npos);
}
