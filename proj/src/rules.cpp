#include "qrw/rules.hpp"

#include <algorithm>
#include <functional>

#include "qrw/scalar.hpp"

namespace qrw {

// ---------------------------------------------------------------- matching

namespace {

bool isSpliceLabel(const std::string& label) {
  return label.size() > 2 && label[0] == '$' && label[1] == '$';
}

bool bindSequence(const std::string& meta, const std::vector<std::string>& value,
                  Match& m) {
  auto [it, inserted] = m.spaces.emplace(meta, value);
  return inserted || it->second == value;
}

bool matchPorts(const std::vector<std::string>& pattern,
                const std::vector<std::string>& concrete, Match& m) {
  if (pattern.size() == 1 && isSpliceLabel(pattern.front())) {
    return bindSequence(pattern.front(), concrete, m);
  }
  if (pattern.size() != concrete.size()) return false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (isMetaLabel(pattern[i])) {
      if (!bindSequence(pattern[i], {concrete[i]}, m)) return false;
    } else if (pattern[i] != concrete[i]) {
      return false;
    }
  }
  return true;
}

bool matchInto(const Term& p, const Term& t, Match& m) {
  switch (p.kind()) {
    case NodeKind::Variable: {
      if (t.sortKind() != p.sortKind()) return false;
      if (!p.ports().empty()) {
        if (!t.space()) return false;
        if (!matchPorts(p.ports(), t.space()->labels(), m)) return false;
      }
      auto [it, inserted] = m.terms.emplace(p.name(), t);
      return inserted || it->second == t;
    }
    case NodeKind::ScalarAtom:
      return t.kind() == NodeKind::ScalarAtom && t.name() == p.name();
    case NodeKind::Numeric:
      return t.kind() == NodeKind::Numeric && t.value() == p.value();
    case NodeKind::ConstVector:
      return t.kind() == NodeKind::ConstVector && t.name() == p.name() &&
             t.basisTag() == p.basisTag() && matchPorts(p.ports(), t.ports(), m);
    case NodeKind::ConstOperator:
      return t.kind() == NodeKind::ConstOperator && t.name() == p.name() &&
             matchPorts(p.ports(), t.ports(), m);
    case NodeKind::Application:
      if (!t.isApp(p.symbol())) return false;
      for (std::size_t i = 0; i < p.args().size(); ++i) {
        if (!matchInto(p.args()[i], t.args()[i], m)) return false;
      }
      return true;
  }
  return false;
}

std::vector<std::string> substitutePorts(const std::vector<std::string>& ports,
                                         const Match& m) {
  std::vector<std::string> out;
  for (const auto& p : ports) {
    if (isMetaLabel(p)) {
      const auto& bound = m.spaces.at(p);
      out.insert(out.end(), bound.begin(), bound.end());
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace

std::optional<Match> match(const Term& pattern, const Term& t) {
  Match m;
  if (!matchInto(pattern, t, m)) return std::nullopt;
  return m;
}

Term instantiate(const Term& pattern, const Match& bindings) {
  switch (pattern.kind()) {
    case NodeKind::Variable:
      return bindings.terms.at(pattern.name());
    case NodeKind::ScalarAtom:
    case NodeKind::Numeric:
      return pattern;
    case NodeKind::ConstVector:
      if (pattern.isGround()) return pattern;
      return Term::vector(pattern.name(),
                          substitutePorts(pattern.ports(), bindings),
                          pattern.basisTag());
    case NodeKind::ConstOperator:
      if (pattern.isGround()) return pattern;
      return Term::op(pattern.name(), substitutePorts(pattern.ports(), bindings));
    case NodeKind::Application: {
      if (pattern.isGround()) return pattern;
      std::vector<Term> args;
      args.reserve(pattern.args().size());
      for (const Term& a : pattern.args()) {
        args.push_back(instantiate(a, bindings));
      }
      return Term::app(pattern.symbol(), std::move(args));
    }
  }
  throw std::logic_error("unhandled node kind");
}

// ---------------------------------------------------------------- validation

namespace {

struct VarInfo {
  SortKind kind;
  std::vector<std::string> ports;
};

void collectVars(const Term& t, std::map<std::string, VarInfo>& vars,
                 std::set<std::string>& metas, const std::string& rule_id) {
  const auto noteMetas = [&](const std::vector<std::string>& ports) {
    for (const auto& p : ports) {
      if (isMetaLabel(p)) metas.insert(p);
    }
  };
  switch (t.kind()) {
    case NodeKind::Variable: {
      noteMetas(t.ports());
      auto [it, inserted] =
          vars.emplace(t.name(), VarInfo{t.sortKind(), t.ports()});
      if (!inserted &&
          (it->second.kind != t.sortKind() || it->second.ports != t.ports())) {
        throw IllFormedRule(rule_id, "variable " + t.name() +
                                         " used with two different sorts");
      }
      return;
    }
    case NodeKind::ConstVector:
    case NodeKind::ConstOperator:
      noteMetas(t.ports());
      return;
    case NodeKind::Application:
      for (const Term& a : t.args()) collectVars(a, vars, metas, rule_id);
      return;
    default:
      return;
  }
}

}  // namespace

void validateRule(const Rule& rule) {
  if (rule.lhs.kind() == NodeKind::Variable) {
    throw IllFormedRule(rule.id, "left-hand side is a bare variable");
  }
  std::map<std::string, VarInfo> lhs_vars, rhs_vars, all;
  std::set<std::string> lhs_metas, rhs_metas, ignored;
  collectVars(rule.lhs, lhs_vars, lhs_metas, rule.id);
  collectVars(rule.rhs, rhs_vars, rhs_metas, rule.id);
  collectVars(rule.lhs, all, ignored, rule.id);
  collectVars(rule.rhs, all, ignored, rule.id);

  const auto requireSubset = [&](const auto& small, const auto& big,
                                 const std::string& side) {
    for (const auto& entry : small) {
      const std::string& name = [&]() -> const std::string& {
        if constexpr (std::is_same_v<std::decay_t<decltype(entry)>,
                                     std::string>) {
          return entry;
        } else {
          return entry.first;
        }
      }();
      if (!big.count(name)) {
        throw IllFormedRule(rule.id, side + " mentions " + name +
                                         " which the other side does not bind");
      }
    }
  };
  requireSubset(rhs_vars, lhs_vars, "right-hand side");
  requireSubset(rhs_metas, lhs_metas, "right-hand side");
  if (rule.bidirectional) {
    requireSubset(lhs_vars, rhs_vars, "left-hand side");
    requireSubset(lhs_metas, rhs_metas, "left-hand side");
  }

  PatternSort lhs_sort, rhs_sort;
  try {
    lhs_sort = patternSortOf(rule.lhs);
    rhs_sort = patternSortOf(rule.rhs);
  } catch (const SortError& e) {
    throw IllFormedRule(rule.id, e.what());
  }
  if (lhs_sort.kind != rhs_sort.kind) {
    throw IllFormedRule(rule.id, std::string("sides have sorts ") +
                                     kindName(lhs_sort.kind) + " and " +
                                     kindName(rhs_sort.kind));
  }
  if (lhs_sort.space && rhs_sort.space && *lhs_sort.space != *rhs_sort.space) {
    throw IllFormedRule(rule.id, "sides live in spaces " +
                                     lhs_sort.space->toString() + " and " +
                                     rhs_sort.space->toString());
  }
}

Rule makeRule(const std::string& id, const std::string& lhs,
              const std::string& rhs, bool bidirectional, RuleKind kind,
              const std::string& group) {
  Rule rule{id, parsePattern(lhs), parsePattern(rhs), bidirectional, kind,
            group};
  validateRule(rule);
  return rule;
}

// ---------------------------------------------------------------- registry

std::size_t Registry::size() const {
  return static_cast<std::size_t>(
      std::count_if(rules_.begin(), rules_.end(), [&](const auto& entry) {
        return entry.second->kind != RuleKind::Support &&
               isEnabled(*entry.second);
      }));
}

const Rule* Registry::find(const std::string& id) const {
  auto it = rules_.find(id);
  return it == rules_.end() ? nullptr : it->second.get();
}

std::vector<const Rule*> Registry::rules() const {
  std::vector<const Rule*> out;
  for (const auto& [id, rule] : rules_) out.push_back(rule.get());
  return out;
}

std::vector<const Rule*> Registry::rulesOfKind(RuleKind kind) const {
  std::vector<const Rule*> out;
  for (const auto& [id, rule] : rules_) {
    if (rule->kind == kind) out.push_back(rule.get());
  }
  return out;
}

bool Registry::isEnabled(const Rule& rule) const {
  return rule.kind != RuleKind::Optional || enabled_optional_.count(rule.id);
}

Registry Registry::withOptional(const std::string& id) const {
  const Rule* rule = find(id);
  if (!rule || rule->kind != RuleKind::Optional) throw UnknownRule(id);
  Registry copy = *this;
  copy.enabled_optional_.insert(id);
  return copy;
}

void Registry::add(Rule rule) {
  if (rule.id != kScalarNormalize) validateRule(rule);
  if (rules_.count(rule.id)) {
    throw IllFormedRule(rule.id, "a rule with this id is already registered");
  }
  std::string id = rule.id;
  rules_.emplace(std::move(id), std::make_shared<const Rule>(std::move(rule)));
}

namespace {

struct CatalogueEntry {
  const char* id;
  const char* lhs;
  const char* rhs;
  const char* group;
};

constexpr CatalogueEntry kCatalogue[] = {
    {"expandRightV", "timesV(S?a, plusV(V?v1, V?v2))",
     "plusV(timesV(S?a, V?v1), timesV(S?a, V?v2))", "vector linear combinations"},
    {"expandLeftV", "timesV(plusS(S?a1, S?a2), V?v)",
     "plusV(timesV(S?a1, V?v), timesV(S?a2, V?v))", "vector linear combinations"},
    {"multiplyLeftV", "timesV(S?a1, timesV(S?a2, V?v))",
     "timesV(timesS(S?a1, S?a2), V?v)", "vector linear combinations"},
    {"expandRightO", "timesO(S?a, plusO(O?o1, O?o2))",
     "plusO(timesO(S?a, O?o1), timesO(S?a, O?o2))",
     "operator linear combinations"},
    {"expandLeftO", "timesO(plusS(S?a1, S?a2), O?o)",
     "plusO(timesO(S?a1, O?o), timesO(S?a2, O?o))",
     "operator linear combinations"},
    {"multiplyLeftO", "timesO(S?a1, timesO(S?a2, O?o))",
     "timesO(timesS(S?a1, S?a2), O?o)", "operator linear combinations"},
    {"expandRightIP", "ip(V?v1, plusV(V?v2, V?v3))",
     "plusS(ip(V?v1, V?v2), ip(V?v1, V?v3))", "inner product sesquilinearity"},
    {"expandLeftIP", "ip(plusV(V?v1, V?v2), V?v3)",
     "plusS(ip(V?v1, V?v3), ip(V?v2, V?v3))", "inner product sesquilinearity"},
    {"multiplyRightIP", "ip(V?v1, timesV(S?a, V?v2))",
     "timesS(S?a, ip(V?v1, V?v2))", "inner product sesquilinearity"},
    {"multiplyLeftIP", "ip(timesV(S?a, V?v1), V?v2)",
     "timesS(conjugate(S?a), ip(V?v1, V?v2))", "inner product sesquilinearity"},
    {"expandRightApply", "apply(O?o, plusV(V?v1, V?v2))",
     "plusV(apply(O?o, V?v1), apply(O?o, V?v2))", "operator application"},
    {"multiplyRightApply", "apply(O?o, timesV(S?a, V?v))",
     "timesV(S?a, apply(O?o, V?v))", "operator application"},
    {"expandLeftApply", "apply(plusO(O?o1, O?o2), V?v)",
     "plusV(apply(O?o1, V?v), apply(O?o2, V?v))", "operator application"},
    {"multiplyLeftApply", "apply(timesO(S?a, O?o), V?v)",
     "timesV(S?a, apply(O?o, V?v))", "operator application"},
    {"expandCompose", "apply(compose(O?o1, O?o2), V?v)",
     "apply(O?o1, apply(O?o2, V?v))", "operator application"},
    {"applyProjector", "apply(projector(V?v1, V?v2), V?v3)",
     "timesV(ip(V?v2, V?v3), V?v1)", "projection operators"},
    {"commuteV", "plusV(V?v1, V?v2)", "plusV(V?v2, V?v1)",
     "associativity and commutativity"},
    {"assocV", "plusV(V?v1, plusV(V?v2, V?v3))",
     "plusV(plusV(V?v1, V?v2), V?v3)", "associativity and commutativity"},
    {"commuteO", "plusO(O?o1, O?o2)", "plusO(O?o2, O?o1)",
     "associativity and commutativity"},
    {"assocO", "plusO(O?o1, plusO(O?o2, O?o3))",
     "plusO(plusO(O?o1, O?o2), O?o3)", "associativity and commutativity"},
    {"tensorV.expandRight", "tensorV(V?v1, plusV(V?v2, V?v3))",
     "plusV(tensorV(V?v1, V?v2), tensorV(V?v1, V?v3))",
     "tensor product linearity (vectors)"},
    {"tensorV.expandLeft", "tensorV(plusV(V?v1, V?v2), V?v3)",
     "plusV(tensorV(V?v1, V?v3), tensorV(V?v2, V?v3))",
     "tensor product linearity (vectors)"},
    {"tensorV.multiplyLeft", "tensorV(timesV(S?a, V?v1), V?v2)",
     "timesV(S?a, tensorV(V?v1, V?v2))", "tensor product linearity (vectors)"},
    {"tensorV.multiplyRight", "tensorV(V?v1, timesV(S?a, V?v2))",
     "timesV(S?a, tensorV(V?v1, V?v2))", "tensor product linearity (vectors)"},
    {"tensorO.expandRight", "tensorO(O?o1, plusO(O?o2, O?o3))",
     "plusO(tensorO(O?o1, O?o2), tensorO(O?o1, O?o3))",
     "tensor product linearity (operators)"},
    {"tensorO.expandLeft", "tensorO(plusO(O?o1, O?o2), O?o3)",
     "plusO(tensorO(O?o1, O?o3), tensorO(O?o2, O?o3))",
     "tensor product linearity (operators)"},
    {"tensorO.multiplyLeft", "tensorO(timesO(S?a, O?o1), O?o2)",
     "timesO(S?a, tensorO(O?o1, O?o2))", "tensor product linearity (operators)"},
    {"tensorO.multiplyRight", "tensorO(O?o1, timesO(S?a, O?o2))",
     "timesO(S?a, tensorO(O?o1, O?o2))", "tensor product linearity (operators)"},
    {"commuteTV", "tensorV(V?v1, V?v2)", "tensorV(V?v2, V?v1)",
     "tensor associativity and commutativity"},
    {"assocTV", "tensorV(V?v1, tensorV(V?v2, V?v3))",
     "tensorV(tensorV(V?v1, V?v2), V?v3)",
     "tensor associativity and commutativity"},
    {"commuteTO", "tensorO(O?o1, O?o2)", "tensorO(O?o2, O?o1)",
     "tensor associativity and commutativity"},
    {"assocTO", "tensorO(O?o1, tensorO(O?o2, O?o3))",
     "tensorO(tensorO(O?o1, O?o2), O?o3)",
     "tensor associativity and commutativity"},
    {"tensor.ip", "ip(tensorV(V?v1, V?v2), tensorV(V?v3, V?v4))",
     "timesS(ip(V?v1, V?v3), ip(V?v2, V?v4))", "tensor inner product"},
    {"tensor.apply", "apply(tensorO(O?o1, O?o2), tensorV(V?v1, V?v2))",
     "tensorV(apply(O?o1, V?v1), apply(O?o2, V?v2))",
     "tensor operator action"},
};

}  // namespace

Registry builtinRegistry() {
  Registry reg;
  for (const auto& e : kCatalogue) {
    reg.add(makeRule(e.id, e.lhs, e.rhs, true, RuleKind::Builtin, e.group));
  }
  reg.add(makeRule("ip.conjugateSymmetry", "conjugate(ip(V?v1, V?v2))",
                   "ip(V?v2, V?v1)", true, RuleKind::Optional,
                   "inner product conjugate symmetry"));
  reg.add(makeRule("unitV", "timesV(1, V?v)", "V?v", true, RuleKind::Support,
                   "scalar identities"));
  reg.add(makeRule("unitO", "timesO(1, O?o)", "O?o", true, RuleKind::Support,
                   "scalar identities"));
  reg.add(makeRule("zeroV", "plusV(V?v1, timesV(0, V?v2))", "V?v1", false,
                   RuleKind::Support, "scalar identities"));
  reg.add(makeRule("zeroO", "plusO(O?o1, timesO(0, O?o2))", "O?o1", false,
                   RuleKind::Support, "scalar identities"));
  reg.add(Rule{kScalarNormalize, Term::variable("a", SortKind::Scalar),
               Term::variable("a", SortKind::Scalar), false, RuleKind::Support,
               "scalar algebra"});
  return reg;
}

std::vector<Rule> qubitRules() {
  const char* group = "qubit gates";
  return {
      makeRule("user.hadamard0", "apply(O:h@$s, V:0@$s)",
               "timesV(1/sqrt2, plusV(V:0@$s, V:1@$s))", false, RuleKind::User,
               group),
      makeRule("user.hadamard1", "apply(O:h@$s, V:1@$s)",
               "timesV(1/sqrt2, plusV(V:0@$s, timesV(-1, V:1@$s)))", false,
               RuleKind::User, group),
      makeRule("user.cnot00", "apply(O:cnot@$s1*$s2, tensorV(V:0@$s1, V:0@$s2))",
               "tensorV(V:0@$s1, V:0@$s2)", false, RuleKind::User, group),
      makeRule("user.cnot01", "apply(O:cnot@$s1*$s2, tensorV(V:0@$s1, V:1@$s2))",
               "tensorV(V:0@$s1, V:1@$s2)", false, RuleKind::User, group),
      makeRule("user.cnot10", "apply(O:cnot@$s1*$s2, tensorV(V:1@$s1, V:0@$s2))",
               "tensorV(V:1@$s1, V:1@$s2)", false, RuleKind::User, group),
      makeRule("user.cnot11", "apply(O:cnot@$s1*$s2, tensorV(V:1@$s1, V:1@$s2))",
               "tensorV(V:1@$s1, V:0@$s2)", false, RuleKind::User, group),
      makeRule("user.identity", "apply(O:id@$$s, V?v@$$s)", "V?v@$$s", false,
               RuleKind::User, group),
  };
}

Registry registerUserRules(Registry registry, const std::vector<Rule>& rules) {
  for (const Rule& r : rules) registry.add(r);
  return registry;
}

std::vector<Rule> loadRuleFile(std::string_view text) {
  std::vector<Rule> rules;
  for (const RuleText& rt : parseRuleFile(text)) {
    Term lhs = parsePattern(rt.lhs);
    Term rhs = parsePattern(rt.rhs);
    Rule rule{rt.id, lhs, rhs, rt.bidirectional, RuleKind::User, "user"};
    validateRule(rule);
    rules.push_back(std::move(rule));
  }
  return rules;
}

Registry defaultRegistry() {
  return registerUserRules(builtinRegistry(), qubitRules());
}

// ---------------------------------------------------------------- application

namespace {

std::optional<Term> rewriteSubterm(const Rule& rule, Direction dir,
                                   const Term& sub) {
  if (rule.id == kScalarNormalize) {
    if (dir != Direction::Forward || sub.sortKind() != SortKind::Scalar ||
        !sub.isGround()) {
      return std::nullopt;
    }
    Term normal = normalizeScalar(sub);
    if (normal == sub) return std::nullopt;
    return normal;
  }
  const Term& from = dir == Direction::Forward ? rule.lhs : rule.rhs;
  const Term& to = dir == Direction::Forward ? rule.rhs : rule.lhs;
  if (from.kind() == NodeKind::Application &&
      !sub.isApp(from.symbol())) {
    return std::nullopt;
  }
  auto bindings = match(from, sub);
  if (!bindings) return std::nullopt;
  try {
    Term result = instantiate(to, *bindings);
    if (result.sort() != sub.sort()) return std::nullopt;
    return result;
  } catch (const SortError&) {
    return std::nullopt;
  }
}

}  // namespace

std::optional<Term> tryApplyRule(const Term& t, const RewriteStep& step,
                                 const Registry& registry) {
  const Rule* rule = registry.find(step.ruleId);
  if (!rule || !registry.isEnabled(*rule)) return std::nullopt;
  if (step.direction == Direction::Reverse && !rule->bidirectional) {
    return std::nullopt;
  }
  if (!isValidPosition(t, step.position)) return std::nullopt;
  auto rewritten =
      rewriteSubterm(*rule, step.direction, subtermAt(t, step.position));
  if (!rewritten) return std::nullopt;
  return replaceAt(t, step.position, *rewritten);
}

Term applyRule(const Term& t, const RewriteStep& step,
               const Registry& registry) {
  const Rule* rule = registry.find(step.ruleId);
  if (!rule || !registry.isEnabled(*rule)) throw UnknownRule(step.ruleId);
  if (step.direction == Direction::Reverse && !rule->bidirectional) {
    throw DirectionNotAllowed(step.ruleId);
  }
  const Term& sub = subtermAt(t, step.position);
  auto rewritten = rewriteSubterm(*rule, step.direction, sub);
  if (!rewritten) throw NoMatch(step.ruleId, step.position.toString());
  return replaceAt(t, step.position, *rewritten);
}

std::vector<RewriteStep> applicable(const Term& t, const Registry& registry) {
  std::vector<RewriteStep> out;
  const auto rules = registry.rules();
  for (const Position& pos : positionsOf(t)) {
    const Term& sub = subtermAt(t, pos);
    for (const Rule* rule : rules) {
      if (!registry.isEnabled(*rule)) continue;
      if (rewriteSubterm(*rule, Direction::Forward, sub)) {
        out.push_back({rule->id, Direction::Forward, pos});
      }
      if (rule->bidirectional && rule->kind != RuleKind::Support &&
          rewriteSubterm(*rule, Direction::Reverse, sub)) {
        out.push_back({rule->id, Direction::Reverse, pos});
      }
    }
  }
  return out;
}

}  // namespace qrw
