#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qrw/rules.hpp"
#include "qrw/term.hpp"

namespace qrw {

using Complex = std::complex<double>;

/// Finite-dimensional interpretation. Constants are keyed by their
/// canonical text, so `V:psi@a*b` and `V:psi@b*a` are different vectors.
///
/// Coordinates of a value over Space {l1 < l2 < ...} are row-major in
/// ascending label order. Tensor products are Kronecker products taken in
/// that order whatever the syntactic order, which is what makes commuteTV
/// and commuteTO sound.
struct Model {
  std::map<std::string, int> dims;
  std::map<std::string, Eigen::VectorXcd> vectors;
  std::map<std::string, Eigen::MatrixXcd> operators;
  std::map<std::string, Complex> scalars;
  std::uint64_t seed = 0;

  int dimension(const Space& s) const;
};

struct ConcreteValue {
  SortKind kind = SortKind::Scalar;
  Space space;
  Complex scalar;
  Eigen::VectorXcd vector;
  Eigen::MatrixXcd matrix;

  double norm() const;
};

/// Throws UnassignedConstant or SortError.
ConcreteValue eval(const Term& t, const Model& m);

/// Dimensions in {2, 3} per label, unit-disc entries per constant, fixed
/// values for computational |0⟩/|1⟩ and the h, cnot and id gates.
/// Deterministic in the seed and independent of the order terms are given.
/// Labels listed in `fixed_dims` take that dimension instead.
Model randomModel(const std::vector<Term>& terms, std::uint64_t seed,
                  const std::map<std::string, int>& fixed_dims = {});
inline Model randomModel(const Term& t, std::uint64_t seed) {
  return randomModel(std::vector<Term>{t}, seed);
}

/// |a - b| <= tol * (1 + max(|a|, |b|)); false on a kind or space mismatch.
bool approxEqual(const ConcreteValue& a, const ConcreteValue& b,
                 double tol = 1e-9);

struct Counterexample {
  std::size_t trial = 0;
  std::string lhs;  // canonical text of the instantiated sides
  std::string rhs;
  double difference = 0;
};

struct SoundnessReport {
  std::string ruleId;
  std::size_t trials = 0;
  std::size_t passed = 0;
  /// Trials for which no well-sorted instance was found in the retry budget.
  std::size_t skipped = 0;
  std::optional<Counterexample> counterexample;

  bool ok() const { return !counterexample && skipped == 0 && passed == trials; }
};

SoundnessReport checkRuleSoundness(const Rule& rule, std::size_t trials,
                                   std::uint64_t seed);
/// Looks the rule up; throws UnknownRule.
SoundnessReport checkRuleSoundness(const std::string& ruleId,
                                   const Registry& registry,
                                   std::size_t trials, std::uint64_t seed);

/// Rule ids that have a deliberately broken variant for negative controls.
std::vector<std::string> mutationTargets();
/// multiplyLeftIP loses its conjugate; applyProjector swaps the arguments
/// of its right-hand inner product. Throws UnknownRule for other ids.
Rule mutatedRule(const Rule& rule);

std::string renderSoundnessText(const std::vector<SoundnessReport>& reports);

}  // namespace qrw
