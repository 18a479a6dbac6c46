#include "qrw/generate.hpp"

#include <algorithm>

namespace qrw {

namespace {

const char* const kScalarNames[] = {"alpha", "beta", "gamma"};
const char* const kVectorNames[] = {"phi", "psi", "chi"};
const char* const kOperatorNames[] = {"A", "B", "U"};

const Coefficient& literal(std::size_t i) {
  static const Coefficient table[] = {
      Coefficient(1),
      Coefficient(-1),
      Coefficient::rational(Rational(1, 2)),
      Coefficient::invSqrt2(),
      Coefficient::imaginaryUnit(),
      Coefficient(2) + Coefficient::imaginaryUnit(),
      Coefficient(0),
  };
  return table[i % std::size(table)];
}

}  // namespace

TermGenerator::TermGenerator(std::uint64_t seed, GenConfig config)
    : rng_(seed), config_(std::move(config)) {}

std::size_t TermGenerator::pick(std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

bool TermGenerator::coin(double p) {
  return std::bernoulli_distribution(p)(rng_);
}

Space TermGenerator::randomSpace(std::size_t max_labels) {
  std::vector<std::string> pool = config_.labels;
  std::shuffle(pool.begin(), pool.end(), rng_);
  const std::size_t limit =
      max_labels == 0 ? pool.size() : std::min(max_labels, pool.size());
  // Favour small spaces: most interesting rules act on one or two labels.
  std::size_t n = 1;
  while (n < limit && coin(0.4)) ++n;
  pool.resize(n);
  return Space(std::move(pool));
}

Term TermGenerator::any() {
  const std::size_t k = pick(3);
  if (k == 0) return scalar(config_.maxDepth);
  const Space s = randomSpace();
  return k == 1 ? vector(s, config_.maxDepth) : op(s, config_.maxDepth);
}

Term TermGenerator::ofSort(SortKind kind, const Space& space, int depth) {
  switch (kind) {
    case SortKind::Scalar:
      return scalar(depth);
    case SortKind::Vector:
      return vector(space, depth);
    case SortKind::Operator:
      return op(space, depth);
  }
  return scalar(depth);
}

std::vector<std::string> TermGenerator::shuffledPorts(const Space& s) {
  std::vector<std::string> ports = s.labels();
  std::shuffle(ports.begin(), ports.end(), rng_);
  return ports;
}

std::pair<Space, Space> TermGenerator::split(const Space& s) {
  std::vector<std::string> labels = s.labels();
  std::shuffle(labels.begin(), labels.end(), rng_);
  const std::size_t cut = 1 + pick(labels.size() - 1);
  return {Space({labels.begin(), labels.begin() + cut}),
          Space({labels.begin() + cut, labels.end()})};
}

Term TermGenerator::scalarLeaf() {
  if (coin(0.5)) return Term::scalarAtom(kScalarNames[pick(3)]);
  return Term::numeric(literal(pick(7)));
}

Term TermGenerator::vectorLeaf(const Space& s) {
  if (config_.gates && s.size() == 1 && coin(0.3)) {
    return Term::vector(coin(0.5) ? "0" : "1", s.labels());
  }
  return Term::vector(kVectorNames[pick(3)], shuffledPorts(s));
}

Term TermGenerator::opLeaf(const Space& s) {
  if (config_.gates && coin(0.4)) {
    if (s.size() == 1) return Term::op(coin(0.5) ? "h" : "id", s.labels());
    if (s.size() == 2 && coin(0.6)) return Term::op("cnot", shuffledPorts(s));
    return Term::op("id", shuffledPorts(s));
  }
  return Term::op(kOperatorNames[pick(3)], shuffledPorts(s));
}

Term TermGenerator::scalar(int depth) {
  if (depth <= 0 || coin(config_.leafBias)) return scalarLeaf();
  switch (pick(5)) {
    case 0:
      return Term::app(Symbol::PlusS, {scalar(depth - 1), scalar(depth - 1)});
    case 1:
      return Term::app(Symbol::TimesS, {scalar(depth - 1), scalar(depth - 1)});
    case 2:
      return Term::app(Symbol::Conjugate, {scalar(depth - 1)});
    default: {
      const Space s = randomSpace(2);
      return Term::app(Symbol::Ip, {vector(s, depth - 1), vector(s, depth - 1)});
    }
  }
}

Term TermGenerator::vector(const Space& s, int depth) {
  if (depth <= 0 || coin(config_.leafBias)) return vectorLeaf(s);
  switch (pick(s.size() >= 2 ? 5 : 4)) {
    case 0:
      return Term::app(Symbol::PlusV, {vector(s, depth - 1), vector(s, depth - 1)});
    case 1:
      return Term::app(Symbol::TimesV, {scalar(depth - 1), vector(s, depth - 1)});
    case 2:
    case 3:
      return Term::app(Symbol::Apply, {op(s, depth - 1), vector(s, depth - 1)});
    default: {
      auto [l, r] = split(s);
      return Term::app(Symbol::TensorV, {vector(l, depth - 1), vector(r, depth - 1)});
    }
  }
}

Term TermGenerator::op(const Space& s, int depth) {
  if (depth <= 0 || coin(config_.leafBias)) return opLeaf(s);
  switch (pick(s.size() >= 2 ? 5 : 4)) {
    case 0:
      return Term::app(Symbol::PlusO, {op(s, depth - 1), op(s, depth - 1)});
    case 1:
      return Term::app(Symbol::TimesO, {scalar(depth - 1), op(s, depth - 1)});
    case 2:
      return Term::app(Symbol::Compose, {op(s, depth - 1), op(s, depth - 1)});
    case 3:
      return Term::app(Symbol::Projector,
                       {vector(s, depth - 1), vector(s, depth - 1)});
    default: {
      auto [l, r] = split(s);
      return Term::app(Symbol::TensorO, {op(l, depth - 1), op(r, depth - 1)});
    }
  }
}

}  // namespace qrw
