#include "qrw/scalar.hpp"

#include <algorithm>
#include <tuple>

#include "qrw/syntax.hpp"

namespace qrw {

bool operator<(const ScalarAtom& a, const ScalarAtom& b) {
  return std::tie(a.kind, a.key, a.conjugated) <
         std::tie(b.kind, b.key, b.conjugated);
}

Term ScalarAtom::toTerm() const {
  Term base = kind == Kind::Named ? Term::scalarAtom(key) : *ip;
  if (conjugated) return Term::app(Symbol::Conjugate, {base});
  return base;
}

ScalarPoly ScalarPoly::constant(const Coefficient& c) {
  ScalarPoly p;
  if (!c.isZero()) p.monomials_.push_back({c, {}});
  return p;
}

ScalarPoly ScalarPoly::atom(ScalarAtom a) {
  ScalarPoly p;
  p.monomials_.push_back({Coefficient(1), {std::move(a)}});
  return p;
}

void ScalarPoly::addMonomial(ScalarMonomial m) {
  auto it = std::lower_bound(
      monomials_.begin(), monomials_.end(), m,
      [](const ScalarMonomial& x, const ScalarMonomial& y) {
        return x.atoms < y.atoms;
      });
  if (it != monomials_.end() && it->atoms == m.atoms) {
    it->coeff += m.coeff;
    if (it->coeff.isZero()) monomials_.erase(it);
    return;
  }
  if (!m.coeff.isZero()) monomials_.insert(it, std::move(m));
}

ScalarPoly operator+(const ScalarPoly& a, const ScalarPoly& b) {
  ScalarPoly out = a;
  for (const auto& m : b.monomials_) out.addMonomial(m);
  return out;
}

ScalarPoly operator*(const ScalarPoly& a, const ScalarPoly& b) {
  ScalarPoly out;
  for (const auto& x : a.monomials_) {
    for (const auto& y : b.monomials_) {
      ScalarMonomial m{x.coeff * y.coeff, x.atoms};
      m.atoms.insert(m.atoms.end(), y.atoms.begin(), y.atoms.end());
      std::sort(m.atoms.begin(), m.atoms.end());
      out.addMonomial(std::move(m));
    }
  }
  return out;
}

ScalarPoly ScalarPoly::conj() const {
  ScalarPoly out;
  for (const auto& m : monomials_) {
    ScalarMonomial c{m.coeff.conj(), m.atoms};
    for (auto& atom : c.atoms) atom.conjugated = !atom.conjugated;
    std::sort(c.atoms.begin(), c.atoms.end());
    out.addMonomial(std::move(c));
  }
  return out;
}

Term ScalarPoly::toTerm() const {
  if (monomials_.empty()) return Term::numeric(Coefficient(0));
  std::vector<Term> terms;
  for (const auto& m : monomials_) {
    std::optional<Term> product;
    for (auto it = m.atoms.rbegin(); it != m.atoms.rend(); ++it) {
      Term a = it->toTerm();
      product = product ? Term::app(Symbol::TimesS, {a, *product}) : a;
    }
    if (!product) {
      terms.push_back(Term::numeric(m.coeff));
    } else if (m.coeff.isOne()) {
      terms.push_back(*product);
    } else {
      terms.push_back(
          Term::app(Symbol::TimesS, {Term::numeric(m.coeff), *product}));
    }
  }
  Term sum = terms.back();
  for (std::size_t i = terms.size() - 1; i-- > 0;) {
    sum = Term::app(Symbol::PlusS, {terms[i], sum});
  }
  return sum;
}

ScalarPoly toScalarPoly(const Term& t) {
  if (!t.isGround() || t.sortKind() != SortKind::Scalar) {
    throw SortError("eps", "expected a ground scalar term");
  }
  switch (t.kind()) {
    case NodeKind::ScalarAtom:
      return ScalarPoly::atom({ScalarAtom::Kind::Named, t.name(), false, {}});
    case NodeKind::Numeric:
      return ScalarPoly::constant(t.value());
    case NodeKind::Application:
      switch (t.symbol()) {
        case Symbol::Conjugate:
          return toScalarPoly(t.arg(1)).conj();
        case Symbol::PlusS:
          return toScalarPoly(t.arg(1)) + toScalarPoly(t.arg(2));
        case Symbol::TimesS:
          return toScalarPoly(t.arg(1)) * toScalarPoly(t.arg(2));
        case Symbol::Ip:
          return ScalarPoly::atom({ScalarAtom::Kind::InnerProduct,
                                   renderCanonical(t), false, t});
        default:
          break;
      }
      break;
    default:
      break;
  }
  throw SortError("eps", "not a scalar term");
}

Term normalizeScalar(const Term& t) { return toScalarPoly(t).toTerm(); }

bool scalarEqual(const Term& a, const Term& b) {
  return normalizeScalar(a) == normalizeScalar(b);
}

}  // namespace qrw
