#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qrw/coefficient.hpp"
#include "qrw/term.hpp"

namespace qrw {

/// Opaque scalar factor of a monomial: a named scalar atom or an inner
/// product, optionally conjugated. Inner products are keyed by the
/// canonical text of the whole ip term.
struct ScalarAtom {
  enum class Kind { Named, InnerProduct };
  Kind kind = Kind::Named;
  std::string key;  // atom name, or canonical text of the ip term
  bool conjugated = false;
  std::optional<Term> ip;  // set for InnerProduct

  /// Named before ip; by key; unconjugated immediately before conjugated.
  friend bool operator<(const ScalarAtom& a, const ScalarAtom& b);
  friend bool operator==(const ScalarAtom& a, const ScalarAtom& b) {
    return a.kind == b.kind && a.key == b.key && a.conjugated == b.conjugated;
  }

  Term toTerm() const;
};

struct ScalarMonomial {
  Coefficient coeff;
  std::vector<ScalarAtom> atoms;  // sorted
};

/// Sum of monomials with distinct atom multisets, sorted by atom list.
/// Empty means zero.
class ScalarPoly {
 public:
  ScalarPoly() = default;
  static ScalarPoly constant(const Coefficient& c);
  static ScalarPoly atom(ScalarAtom a);

  const std::vector<ScalarMonomial>& monomials() const { return monomials_; }
  bool isZero() const { return monomials_.empty(); }

  friend ScalarPoly operator+(const ScalarPoly& a, const ScalarPoly& b);
  friend ScalarPoly operator*(const ScalarPoly& a, const ScalarPoly& b);
  ScalarPoly conj() const;

  /// Nested plusS/timesS in canonical order.
  Term toTerm() const;

 private:
  void addMonomial(ScalarMonomial m);
  std::vector<ScalarMonomial> monomials_;
};

/// Interprets a ground scalar term as a polynomial. Throws SortError when
/// `t` is not scalar-sorted.
ScalarPoly toScalarPoly(const Term& t);

/// Canonical form: conjugation pushed onto atoms, products expanded,
/// like monomials merged. Idempotent.
Term normalizeScalar(const Term& t);

bool scalarEqual(const Term& a, const Term& b);

}  // namespace qrw
