#include "qrw/interp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "qrw/generate.hpp"
#include "qrw/scalar.hpp"
#include "qrw/syntax.hpp"

namespace qrw {

namespace {

std::uint64_t fnv1a(std::uint64_t seed, std::string_view key) {
  std::uint64_t h = 1469598103934665603ULL ^ seed;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // splitmix finaliser; FNV alone leaves nearby seeds correlated
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

Complex unitDisc(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = std::sqrt(u(rng));
  const double theta = 2 * M_PI * u(rng);
  return std::polar(r, theta);
}

std::vector<int> dimsOf(const std::vector<std::string>& labels,
                        const Model& m) {
  std::vector<int> out;
  for (const auto& l : labels) {
    auto it = m.dims.find(l);
    if (it == m.dims.end()) throw UnassignedConstant("space label " + l);
    out.push_back(it->second);
  }
  return out;
}

// perm[i] = index in port order of the basis state whose sorted-label
// coordinates flatten to i.
std::vector<int> portPermutation(const std::vector<std::string>& ports,
                                 const Model& m) {
  const std::size_t k = ports.size();
  std::vector<std::size_t> order(k);  // order[j]: port feeding sorted slot j
  for (std::size_t j = 0; j < k; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return ports[x] < ports[y];
  });
  const std::vector<int> port_dims = dimsOf(ports, m);
  int total = 1;
  for (int d : port_dims) total *= d;
  std::vector<int> perm(total);
  std::vector<int> digits(k, 0);  // sorted-slot digits
  for (int i = 0; i < total; ++i) {
    std::vector<int> port_digits(k);
    for (std::size_t j = 0; j < k; ++j) port_digits[order[j]] = digits[j];
    int idx = 0;
    for (std::size_t p = 0; p < k; ++p) idx = idx * port_dims[p] + port_digits[p];
    perm[i] = idx;
    for (std::size_t j = k; j-- > 0;) {
      if (++digits[j] < port_dims[order[j]]) break;
      digits[j] = 0;
    }
  }
  return perm;
}

// Fixed gate matrix in port order, or nullopt for an ordinary constant.
std::optional<Eigen::MatrixXcd> gateMatrix(const Term& c, const Model& m) {
  const auto& ports = c.ports();
  const std::vector<int> d = dimsOf(ports, m);
  int total = 1;
  for (int x : d) total *= x;
  if (c.name() == "id") return Eigen::MatrixXcd::Identity(total, total);
  if (c.name() == "h" && ports.size() == 1) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(total, total);
    const double s = 1 / std::sqrt(2.0);
    h(0, 0) = s;
    h(0, 1) = s;
    h(1, 0) = s;
    h(1, 1) = -s;
    return h;
  }
  if (c.name() == "cnot" && ports.size() == 2 && ports[0] != ports[1]) {
    // Control is the first port; flips 0 <-> 1 on the target when the
    // control is 1 and leaves every other basis state alone.
    Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(total, total);
    for (int ctl = 0; ctl < d[0]; ++ctl) {
      for (int tgt = 0; tgt < d[1]; ++tgt) {
        int out = tgt;
        if (ctl == 1 && tgt <= 1) out = 1 - tgt;
        g(ctl * d[1] + out, ctl * d[1] + tgt) = 1;
      }
    }
    return g;
  }
  return std::nullopt;
}

Eigen::MatrixXcd toSortedOrder(const Eigen::MatrixXcd& port_matrix,
                               const std::vector<std::string>& ports,
                               const Model& m) {
  const std::vector<int> perm = portPermutation(ports, m);
  const auto n = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = port_matrix(perm[i], perm[j]);
  }
  return out;
}

void collectConstants(const Term& t, std::vector<Term>& out,
                      std::set<std::string>& labels) {
  switch (t.kind()) {
    case NodeKind::ScalarAtom:
    case NodeKind::ConstVector:
    case NodeKind::ConstOperator:
      out.push_back(t);
      for (const auto& p : t.ports()) labels.insert(p);
      return;
    case NodeKind::Application:
      for (const Term& a : t.args()) collectConstants(a, out, labels);
      return;
    default:
      return;
  }
}

// For each coordinate of the merged (ascending-label) product space, the
// coordinates in the two factors.
std::vector<std::pair<int, int>> tensorIndex(const Space& a, const Space& b,
                                             const Model& m) {
  const auto& la = a.labels();
  const auto& lb = b.labels();
  struct Slot {
    bool from_a;
    int dim;
    int stride;
  };
  std::vector<Slot> slots;
  const std::vector<int> da = dimsOf(la, m);
  const std::vector<int> db = dimsOf(lb, m);
  std::vector<int> stride_a(la.size()), stride_b(lb.size());
  for (int i = static_cast<int>(la.size()), s = 1; i-- > 0; s *= da[i]) stride_a[i] = s;
  for (int i = static_cast<int>(lb.size()), s = 1; i-- > 0; s *= db[i]) stride_b[i] = s;
  std::size_t i = 0, j = 0;
  while (i < la.size() || j < lb.size()) {
    if (j == lb.size() || (i < la.size() && !(lb[j] < la[i]))) {
      slots.push_back({true, da[i], stride_a[i]});
      ++i;
    } else {
      slots.push_back({false, db[j], stride_b[j]});
      ++j;
    }
  }
  int total = 1;
  for (const Slot& s : slots) total *= s.dim;
  std::vector<std::pair<int, int>> out(total);
  std::vector<int> digits(slots.size(), 0);
  for (int r = 0; r < total; ++r) {
    int ia = 0, ib = 0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      (slots[k].from_a ? ia : ib) += digits[k] * slots[k].stride;
    }
    out[r] = {ia, ib};
    for (std::size_t k = slots.size(); k-- > 0;) {
      if (++digits[k] < slots[k].dim) break;
      digits[k] = 0;
    }
  }
  return out;
}

ConcreteValue scalarValue(Complex c) {
  ConcreteValue v;
  v.scalar = c;
  return v;
}

ConcreteValue vectorValue(Space s, Eigen::VectorXcd x) {
  ConcreteValue v;
  v.kind = SortKind::Vector;
  v.space = std::move(s);
  v.vector = std::move(x);
  return v;
}

ConcreteValue operatorValue(Space s, Eigen::MatrixXcd x) {
  ConcreteValue v;
  v.kind = SortKind::Operator;
  v.space = std::move(s);
  v.matrix = std::move(x);
  return v;
}

void requireSameSpace(const ConcreteValue& a, const ConcreteValue& b,
                      const char* what) {
  if (a.space != b.space) {
    throw SortError("eps", std::string(what) + " over " + a.space.toString() +
                               " and " + b.space.toString());
  }
}

}  // namespace

int Model::dimension(const Space& s) const {
  int total = 1;
  for (int d : dimsOf(s.labels(), *this)) total *= d;
  return total;
}

double ConcreteValue::norm() const {
  switch (kind) {
    case SortKind::Scalar:
      return std::abs(scalar);
    case SortKind::Vector:
      return vector.norm();
    case SortKind::Operator:
      return matrix.norm();
  }
  return 0;
}

ConcreteValue eval(const Term& t, const Model& m) {
  switch (t.kind()) {
    case NodeKind::Variable:
      throw SortError("eps", "cannot evaluate pattern variable " + t.name());
    case NodeKind::Numeric:
      return scalarValue(t.value().toComplex());
    case NodeKind::ScalarAtom: {
      auto it = m.scalars.find(t.name());
      if (it == m.scalars.end()) throw UnassignedConstant(t.name());
      return scalarValue(it->second);
    }
    case NodeKind::ConstVector: {
      const std::string key = renderCanonical(t);
      auto it = m.vectors.find(key);
      if (it == m.vectors.end()) throw UnassignedConstant(key);
      return vectorValue(*t.space(), it->second);
    }
    case NodeKind::ConstOperator: {
      const std::string key = renderCanonical(t);
      auto it = m.operators.find(key);
      if (it == m.operators.end()) throw UnassignedConstant(key);
      return operatorValue(*t.space(), it->second);
    }
    case NodeKind::Application:
      break;
  }

  std::vector<ConcreteValue> a;
  for (const Term& arg : t.args()) a.push_back(eval(arg, m));
  switch (t.symbol()) {
    case Symbol::Conjugate:
      return scalarValue(std::conj(a[0].scalar));
    case Symbol::PlusS:
      return scalarValue(a[0].scalar + a[1].scalar);
    case Symbol::TimesS:
      return scalarValue(a[0].scalar * a[1].scalar);
    case Symbol::PlusV:
      requireSameSpace(a[0], a[1], "plusV");
      return vectorValue(a[0].space, a[0].vector + a[1].vector);
    case Symbol::TimesV:
      return vectorValue(a[1].space, a[0].scalar * a[1].vector);
    case Symbol::PlusO:
      requireSameSpace(a[0], a[1], "plusO");
      return operatorValue(a[0].space, a[0].matrix + a[1].matrix);
    case Symbol::TimesO:
      return operatorValue(a[1].space, a[0].scalar * a[1].matrix);
    case Symbol::Ip:
      requireSameSpace(a[0], a[1], "ip");
      return scalarValue(a[0].vector.dot(a[1].vector));  // conjugates a[0]
    case Symbol::Apply:
      requireSameSpace(a[0], a[1], "apply");
      return vectorValue(a[1].space, a[0].matrix * a[1].vector);
    case Symbol::Compose:
      requireSameSpace(a[0], a[1], "compose");
      return operatorValue(a[0].space, a[0].matrix * a[1].matrix);
    case Symbol::Projector:
      requireSameSpace(a[0], a[1], "projector");
      return operatorValue(a[0].space, a[0].vector * a[1].vector.adjoint());
    case Symbol::TensorV: {
      const auto idx = tensorIndex(a[0].space, a[1].space, m);
      Eigen::VectorXcd out(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t r = 0; r < idx.size(); ++r) {
        out(r) = a[0].vector(idx[r].first) * a[1].vector(idx[r].second);
      }
      return vectorValue(tensorSpace(a[0].space, a[1].space), std::move(out));
    }
    case Symbol::TensorO: {
      const auto idx = tensorIndex(a[0].space, a[1].space, m);
      const auto n = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXcd out(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
          out(r, c) = a[0].matrix(idx[r].first, idx[c].first) *
                      a[1].matrix(idx[r].second, idx[c].second);
        }
      }
      return operatorValue(tensorSpace(a[0].space, a[1].space), std::move(out));
    }
  }
  throw std::logic_error("unhandled symbol");
}

Model randomModel(const std::vector<Term>& terms, std::uint64_t seed,
                  const std::map<std::string, int>& fixed_dims) {
  Model m;
  m.seed = seed;
  std::vector<Term> constants;
  std::set<std::string> labels;
  for (const Term& t : terms) collectConstants(t, constants, labels);
  for (const auto& l : labels) {
    auto fixed = fixed_dims.find(l);
    m.dims[l] = fixed != fixed_dims.end()
                    ? fixed->second
                    : 2 + static_cast<int>(fnv1a(seed, "dim:" + l) % 2);
  }
  for (const Term& c : constants) {
    const std::string key = renderCanonical(c);
    std::mt19937_64 rng(fnv1a(seed, key));
    if (c.kind() == NodeKind::ScalarAtom) {
      m.scalars.emplace(c.name(), unitDisc(rng));
      continue;
    }
    const int n = m.dimension(*c.space());
    if (c.kind() == NodeKind::ConstVector) {
      Eigen::VectorXcd v(n);
      if (c.basisTag() == "computational" && (c.name() == "0" || c.name() == "1")) {
        // |0...0⟩ or |1...1⟩ in the product basis
        v.setZero();
        int idx = 0;
        if (c.name() == "1") {
          for (int d : dimsOf(c.space()->labels(), m)) idx = idx * d + 1;
        }
        v(idx) = 1;
      } else {
        for (int i = 0; i < n; ++i) v(i) = unitDisc(rng);
      }
      m.vectors.emplace(key, std::move(v));
    } else {
      if (auto gate = gateMatrix(c, m)) {
        m.operators.emplace(key, toSortedOrder(*gate, c.ports(), m));
        continue;
      }
      Eigen::MatrixXcd x(n, n);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) x(i, j) = unitDisc(rng);
      }
      m.operators.emplace(key, std::move(x));
    }
  }
  return m;
}

bool approxEqual(const ConcreteValue& a, const ConcreteValue& b, double tol) {
  if (a.kind != b.kind || a.space != b.space) return false;
  double diff = 0;
  switch (a.kind) {
    case SortKind::Scalar:
      diff = std::abs(a.scalar - b.scalar);
      break;
    case SortKind::Vector:
      if (a.vector.size() != b.vector.size()) return false;
      diff = (a.vector - b.vector).norm();
      break;
    case SortKind::Operator:
      if (a.matrix.rows() != b.matrix.rows()) return false;
      diff = (a.matrix - b.matrix).norm();
      break;
  }
  return diff <= tol * (1 + std::max(a.norm(), b.norm()));
}

// ---------------------------------------------------------------- soundness

namespace {

struct VarSpec {
  SortKind kind;
  std::vector<std::string> ports;
};

void collectPatternVars(const Term& t, std::map<std::string, VarSpec>& vars,
                        std::set<std::string>& metas) {
  for (const auto& p : t.ports()) {
    if (isMetaLabel(p)) metas.insert(p);
  }
  if (t.kind() == NodeKind::Variable) vars.emplace(t.name(), VarSpec{t.sortKind(), t.ports()});
  if (t.kind() == NodeKind::Application) {
    for (const Term& a : t.args()) collectPatternVars(a, vars, metas);
  }
}

bool labelsDistinct(const Term& t) {
  if (t.sortKind() != SortKind::Scalar && t.space() && t.space()->hasDuplicates()) {
    return false;
  }
  if (t.kind() != NodeKind::Application) return true;
  for (const Term& a : t.args()) {
    if (!labelsDistinct(a)) return false;
  }
  return true;
}

struct Instance {
  Term lhs;
  Term rhs;
};

std::optional<Instance> instantiateRandomly(const Rule& rule,
                                            TermGenerator& gen) {
  std::map<std::string, VarSpec> vars;
  std::set<std::string> metas;
  collectPatternVars(rule.lhs, vars, metas);
  collectPatternVars(rule.rhs, vars, metas);

  Match m;
  for (const auto& meta : metas) {
    const bool splice = meta.size() > 2 && meta[1] == '$';
    std::vector<std::string> labels = gen.randomSpace(splice ? 2 : 1).labels();
    std::shuffle(labels.begin(), labels.end(), gen.rng());
    m.spaces[meta] = labels;
  }
  for (const auto& [name, spec] : vars) {
    Space space;
    if (spec.kind != SortKind::Scalar) {
      if (spec.ports.empty()) {
        space = gen.randomSpace(2);
      } else {
        std::vector<std::string> labels;
        for (const auto& p : spec.ports) {
          if (isMetaLabel(p)) {
            const auto& bound = m.spaces.at(p);
            labels.insert(labels.end(), bound.begin(), bound.end());
          } else {
            labels.push_back(p);
          }
        }
        space = Space(std::move(labels));
      }
    }
    std::uniform_int_distribution<int> depth(0, 2);
    m.terms.emplace(name, gen.ofSort(spec.kind, space, depth(gen.rng())));
  }
  try {
    Term lhs = instantiate(rule.lhs, m);
    Term rhs = rule.id == kScalarNormalize ? normalizeScalar(lhs)
                                           : instantiate(rule.rhs, m);
    if (lhs.sort() != rhs.sort()) return std::nullopt;
    if (!labelsDistinct(lhs) || !labelsDistinct(rhs)) return std::nullopt;
    return Instance{lhs, rhs};
  } catch (const SortError&) {
    return std::nullopt;
  }
}

constexpr int kInstanceAttempts = 5000;

}  // namespace

SoundnessReport checkRuleSoundness(const Rule& rule, std::size_t trials,
                                   std::uint64_t seed) {
  SoundnessReport report;
  report.ruleId = rule.id;
  report.trials = trials;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::uint64_t trial_seed =
        fnv1a(seed, rule.id + "#" + std::to_string(trial));
    TermGenerator gen(trial_seed);
    std::optional<Instance> inst;
    for (int attempt = 0; attempt < kInstanceAttempts && !inst; ++attempt) {
      inst = instantiateRandomly(rule, gen);
    }
    if (!inst) {
      ++report.skipped;
      continue;
    }
    const Model model = randomModel({inst->lhs, inst->rhs}, trial_seed);
    const ConcreteValue l = eval(inst->lhs, model);
    const ConcreteValue r = eval(inst->rhs, model);
    if (approxEqual(l, r)) {
      ++report.passed;
      continue;
    }
    if (!report.counterexample) {
      double diff = std::numeric_limits<double>::infinity();
      if (l.kind == r.kind && l.space == r.space) {
        ConcreteValue d = l;
        d.scalar -= r.scalar;
        if (l.kind == SortKind::Vector) d.vector -= r.vector;
        if (l.kind == SortKind::Operator) d.matrix -= r.matrix;
        diff = d.norm();
      }
      report.counterexample = Counterexample{trial, renderCanonical(inst->lhs),
                                             renderCanonical(inst->rhs), diff};
    }
  }
  return report;
}

SoundnessReport checkRuleSoundness(const std::string& ruleId,
                                   const Registry& registry,
                                   std::size_t trials, std::uint64_t seed) {
  const Rule* rule = registry.find(ruleId);
  if (!rule) throw UnknownRule(ruleId);
  return checkRuleSoundness(*rule, trials, seed);
}

std::vector<std::string> mutationTargets() {
  return {"applyProjector", "multiplyLeftIP"};
}

Rule mutatedRule(const Rule& rule) {
  if (rule.id == "multiplyLeftIP") {
    return makeRule(rule.id, "ip(timesV(S?a, V?v1), V?v2)",
                    "timesS(S?a, ip(V?v1, V?v2))", rule.bidirectional,
                    rule.kind, rule.group);
  }
  if (rule.id == "applyProjector") {
    return makeRule(rule.id, "apply(projector(V?v1, V?v2), V?v3)",
                    "timesV(ip(V?v3, V?v2), V?v1)", rule.bidirectional,
                    rule.kind, rule.group);
  }
  throw UnknownRule(rule.id + " (no mutation defined)");
}

std::string renderSoundnessText(const std::vector<SoundnessReport>& reports) {
  std::ostringstream out;
  std::size_t width = 4;
  for (const auto& r : reports) width = std::max(width, r.ruleId.size());
  out << std::left << std::setw(static_cast<int>(width)) << "rule"
      << "  passed  status\n";
  std::size_t failed = 0;
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(width)) << r.ruleId << "  "
        << std::right << std::setw(3) << r.passed << "/" << std::left
        << std::setw(3) << r.trials << " " << (r.ok() ? "ok" : "FAIL");
    if (r.skipped) out << " (" << r.skipped << " trials without an instance)";
    out << "\n";
    if (r.counterexample) {
      ++failed;
      out << "    trial " << r.counterexample->trial << ": |lhs - rhs| = "
          << r.counterexample->difference << "\n"
          << "    lhs: " << r.counterexample->lhs << "\n"
          << "    rhs: " << r.counterexample->rhs << "\n";
    } else if (!r.ok()) {
      ++failed;
    }
  }
  out << reports.size() - failed << " of " << reports.size()
      << " rules sound\n";
  return out.str();
}

}  // namespace qrw
