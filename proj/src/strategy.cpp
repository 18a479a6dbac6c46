#include "qrw/strategy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>

#include "qrw/scalar.hpp"

namespace qrw {

namespace {

// Rules used left-to-right while expanding to sum-of-products form, in
// priority order.
constexpr const char* kExpansionRules[] = {
    "expandCompose",        "applyProjector",        "tensor.apply",
    "tensor.ip",            "expandRightApply",      "expandLeftApply",
    "multiplyRightApply",   "multiplyLeftApply",     "expandRightIP",
    "expandLeftIP",         "multiplyRightIP",       "multiplyLeftIP",
    "tensorV.expandRight",  "tensorV.expandLeft",    "tensorV.multiplyLeft",
    "tensorV.multiplyRight", "tensorO.expandRight",  "tensorO.expandLeft",
    "tensorO.multiplyLeft", "tensorO.multiplyRight", "expandRightV",
    "multiplyLeftV",        "expandRightO",          "multiplyLeftO",
};

struct ChainRules {
  Symbol symbol;
  const char* commute;
  const char* assoc;
};

constexpr ChainRules kTensorV{Symbol::TensorV, "commuteTV", "assocTV"};
constexpr ChainRules kTensorO{Symbol::TensorO, "commuteTO", "assocTO"};
constexpr ChainRules kPlusV{Symbol::PlusV, "commuteV", "assocV"};
constexpr ChainRules kPlusO{Symbol::PlusO, "commuteO", "assocO"};

struct SumRules {
  ChainRules chain;
  Symbol times;
  const char* collect;  // expandLeft, used in reverse
  const char* unit;
  const char* zero;
};

constexpr SumRules kSumV{kPlusV, Symbol::TimesV, "expandLeftV", "unitV",
                         "zeroV"};
constexpr SumRules kSumO{kPlusO, Symbol::TimesO, "expandLeftO", "unitO",
                         "zeroO"};

bool isLiteral(const Term& t, long long value) {
  return t.kind() == NodeKind::Numeric && t.value() == Coefficient(value);
}

struct FactorKey {
  std::vector<std::string> labels;
  std::string text;
  friend bool operator<(const FactorKey& a, const FactorKey& b) {
    return std::tie(a.labels, a.text) < std::tie(b.labels, b.text);
  }
};

FactorKey factorKey(const Term& t) {
  return {t.space().value_or(Space{}).labels(), renderCanonical(t)};
}

bool includes(const Space& big, const Space& small) {
  return std::includes(big.labels().begin(), big.labels().end(),
                       small.labels().begin(), small.labels().end());
}

class Normalizer {
 public:
  Normalizer(const Term& t, const Registry& registry,
             const NormalizeConfig& config)
      : term_(t), registry_(registry), config_(config) {
    for (const char* id : kExpansionRules) addExpansion(id);
    if (config.applyUserRules) {
      for (const Rule* r : registry.rulesOfKind(RuleKind::User)) {
        addExpansion(r->id);
      }
    }
    for (const std::string& id : config.optionalRules) addExpansion(id);
  }

  NormalizeResult run() {
    const Term initial = term_;
    while (true) {
      const std::size_t before = steps_.size();
      expand();
      canonicalize(Position{});
      if (steps_.size() == before) break;
    }
    return {term_, Derivation{initial, steps_, term_}};
  }

 private:
  void addExpansion(const std::string& id) {
    const Rule* rule = registry_.find(id);
    if (!rule || !registry_.isEnabled(*rule)) return;
    if (rule->lhs.kind() != NodeKind::Application) return;
    by_head_[rule->lhs.symbol()].push_back(id);
  }

  const Term& at(const Position& p) const { return subtermAt(term_, p); }

  void record(RewriteStep step, Term next) {
    if (steps_.size() >= config_.maxSteps) {
      throw StepLimitExceeded(config_.maxSteps);
    }
    term_ = std::move(next);
    steps_.push_back(std::move(step));
  }

  void apply(const char* id, Direction dir, const Position& p) {
    RewriteStep step{id, dir, p};
    Term next = applyRule(term_, step, registry_);
    record(std::move(step), std::move(next));
  }

  bool tryApply(const std::string& id, Direction dir, const Position& p) {
    RewriteStep step{id, dir, p};
    auto next = tryApplyRule(term_, step, registry_);
    if (!next) return false;
    record(std::move(step), std::move(*next));
    return true;
  }

  // Runs a reshaping pass; if it leaves the term as it was (flatten then
  // regroup to the same shape) its steps are dropped, so canonical input
  // costs nothing and the outer loop terminates.
  template <class F>
  void idempotent(F&& reshape) {
    const Term before = term_;
    const std::size_t mark = steps_.size();
    reshape();
    if (term_ == before) steps_.resize(mark);
  }

  // ------------------------------------------------------------ expansion

  std::optional<RewriteStep> findRedex(const Term& t, Position& here) {
    if (t.kind() != NodeKind::Application) return std::nullopt;
    auto it = by_head_.find(t.symbol());
    if (it != by_head_.end()) {
      for (const std::string& id : it->second) {
        RewriteStep step{id, Direction::Forward, here};
        const Rule* rule = registry_.find(id);
        auto m = match(rule->lhs, t);
        if (!m) continue;
        try {
          Term r = instantiate(rule->rhs, *m);
          if (r.sort() == t.sort()) return step;
        } catch (const SortError&) {
        }
      }
    }
    for (std::size_t i = 0; i < t.args().size(); ++i) {
      here.path.push_back(i + 1);
      auto found = findRedex(t.args()[i], here);
      here.path.pop_back();
      if (found) return found;
    }
    return std::nullopt;
  }

  void expand() {
    while (true) {
      Position root;
      auto redex = findRedex(term_, root);
      if (!redex) return;
      Term next = applyRule(term_, *redex, registry_);
      record(*redex, std::move(next));
    }
  }

  // ------------------------------------------------------------ canonical

  static bool sameChain(const Term& t, Symbol s) { return t.isApp(s); }

  // Leaves of the maximal chain of `sym` rooted at p, in order.
  std::vector<Position> chainLeaves(const Position& p, Symbol sym) const {
    std::vector<Position> out;
    std::vector<Position> stack{p};
    while (!stack.empty()) {
      Position q = stack.back();
      stack.pop_back();
      if (at(q).isApp(sym)) {
        stack.push_back(q.child(2));
        stack.push_back(q.child(1));
      } else {
        out.push_back(q);
      }
    }
    return out;
  }

  std::optional<Symbol> parentSymbol(const Position& p) const {
    if (p.isRoot()) return std::nullopt;
    const Term& parent = at(p.parent());
    return parent.symbol();
  }

  void canonicalize(const Position& p) {
    const Term node = at(p);
    const auto parent = parentSymbol(p);
    if (node.kind() == NodeKind::Application) {
      const Symbol sym = node.symbol();
      const bool chain_symbol = sym == Symbol::TensorV ||
                                sym == Symbol::TensorO ||
                                sym == Symbol::PlusV || sym == Symbol::PlusO;
      if (chain_symbol && parent != sym) {
        for (const Position& leaf : chainLeaves(p, sym)) canonicalize(leaf);
        if (sym == Symbol::TensorV) {
          idempotent([&] { shapeTensorChain(p, kTensorV); });
        }
        if (sym == Symbol::TensorO) {
          idempotent([&] { shapeTensorChain(p, kTensorO); });
        }
      } else if (!chain_symbol) {
        for (std::size_t i = 1; i <= node.args().size(); ++i) {
          canonicalize(p.child(i));
        }
      }
    }
    const Term now = at(p);
    const bool parent_scalar =
        parent && resultKind(*parent) == SortKind::Scalar;
    if (now.sortKind() == SortKind::Scalar && !parent_scalar) {
      tryApply(kScalarNormalize, Direction::Forward, p);
      return;
    }
    const bool sum_context =
        !parent || (*parent != Symbol::PlusV && *parent != Symbol::PlusO &&
                    *parent != Symbol::TimesV && *parent != Symbol::TimesO &&
                    *parent != Symbol::TensorV && *parent != Symbol::TensorO);
    if (!sum_context) return;
    if (now.sortKind() == SortKind::Vector) {
      idempotent([&] { collectSum(p, kSumV); });
    } else if (now.sortKind() == SortKind::Operator) {
      idempotent([&] { collectSum(p, kSumO); });
    }
  }

  // Rewrites the chain at p into right-nested form: sym(l1, sym(l2, ...)).
  void flatten(const Position& p, const ChainRules& rules) {
    Position q = p;
    while (at(q).isApp(rules.symbol)) {
      while (at(q).arg(1).isApp(rules.symbol)) {
        apply(rules.assoc, Direction::Reverse, q);
      }
      q = q.child(2);
    }
  }

  static Position chainNode(const Position& p, std::size_t k) {
    Position q = p;
    for (std::size_t i = 0; i < k; ++i) q = q.child(2);
    return q;
  }

  // Position of leaf i in a right-nested chain of n leaves rooted at p.
  static Position leafPosition(const Position& p, std::size_t i,
                               std::size_t n) {
    if (n == 1) return p;
    if (i + 1 < n) return chainNode(p, i).child(1);
    return chainNode(p, n - 2).child(2);
  }

  // Swaps leaves i and i+1 of a right-nested chain with n leaves.
  void swapAdjacent(const Position& p, std::size_t i, std::size_t n,
                    const ChainRules& rules) {
    const Position node = chainNode(p, i);
    if (i + 2 == n) {
      apply(rules.commute, Direction::Forward, node);
      return;
    }
    apply(rules.assoc, Direction::Forward, node);
    apply(rules.commute, Direction::Forward, node.child(1));
    apply(rules.assoc, Direction::Reverse, node);
  }

  // Bubble-sorts the right-nested chain at p so leaf order follows `rank`
  // (rank[i] is the target rank of the leaf currently at i).
  void sortChain(const Position& p, std::vector<std::size_t> rank,
                 const ChainRules& rules) {
    const std::size_t n = rank.size();
    for (std::size_t pass = 0; pass < n; ++pass) {
      bool swapped = false;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (rank[i] > rank[i + 1]) {
          swapAdjacent(p, i, n, rules);
          std::swap(rank[i], rank[i + 1]);
          swapped = true;
        }
      }
      if (!swapped) break;
    }
  }

  static std::vector<std::size_t> ranksFromKeys(
      const std::vector<FactorKey>& keys) {
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return keys[a] < keys[b];
                     });
    std::vector<std::size_t> rank(keys.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
  }

  struct TensorTarget {
    std::vector<std::size_t> rank;     // per current leaf
    std::vector<std::size_t> groups;   // group sizes in target order
  };

  // Leaf order and grouping that let an operator acting on this chain
  // fire: tensor operators split by factor space, multi-port constants
  // take their factors in port order.
  std::optional<TensorTarget> operatorTarget(const Position& p,
                                             const std::vector<Term>& leaves) {
    if (p.isRoot() || p.path.back() != 2) return std::nullopt;
    const Term& parent = at(p.parent());
    if (!parent.isApp(Symbol::Apply)) return std::nullopt;
    const Term& op = parent.arg(1);
    const std::size_t n = leaves.size();

    if (op.kind() == NodeKind::ConstOperator && op.ports().size() >= 2) {
      if (op.ports().size() != n) return std::nullopt;
      TensorTarget target{std::vector<std::size_t>(n), {n}};
      std::vector<bool> used(n, false);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& labels = leaves[i].space()->labels();
        if (labels.size() != 1) return std::nullopt;
        bool found = false;
        for (std::size_t j = 0; j < n; ++j) {
          if (!used[j] && op.ports()[j] == labels.front()) {
            target.rank[i] = j;
            used[j] = true;
            found = true;
            break;
          }
        }
        if (!found) return std::nullopt;
      }
      return target;
    }

    if (!op.isApp(Symbol::TensorO)) return std::nullopt;
    std::vector<Term> op_factors;
    for (const Position& q : chainLeaves(p.parent().child(1), Symbol::TensorO)) {
      op_factors.push_back(at(q));
    }
    std::vector<std::size_t> group_of(n);
    std::vector<std::vector<std::size_t>> members(op_factors.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<std::size_t> owner;
      for (std::size_t j = 0; j < op_factors.size(); ++j) {
        if (includes(*op_factors[j].space(), *leaves[i].space())) {
          if (owner) return std::nullopt;
          owner = j;
        }
      }
      if (!owner) return std::nullopt;
      group_of[i] = *owner;
      members[*owner].push_back(i);
    }
    TensorTarget target{std::vector<std::size_t>(n), {}};
    std::size_t next_rank = 0;
    for (std::size_t j = 0; j < op_factors.size(); ++j) {
      Space joined;
      for (std::size_t i : members[j]) {
        joined = tensorSpace(joined, *leaves[i].space());
      }
      if (joined != *op_factors[j].space()) return std::nullopt;
      std::vector<std::size_t> ordered = members[j];
      const Term& factor = op_factors[j];
      if (factor.kind() == NodeKind::ConstOperator &&
          factor.ports().size() == ordered.size() && ordered.size() > 1) {
        std::vector<std::size_t> port_rank(n);
        for (std::size_t i : ordered) {
          const auto& labels = leaves[i].space()->labels();
          auto it = labels.size() == 1
                        ? std::find(factor.ports().begin(),
                                    factor.ports().end(), labels.front())
                        : factor.ports().end();
          port_rank[i] = static_cast<std::size_t>(it - factor.ports().begin());
        }
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](std::size_t a, std::size_t b) {
                           return port_rank[a] < port_rank[b];
                         });
      } else {
        std::stable_sort(ordered.begin(), ordered.end(),
                         [&](std::size_t a, std::size_t b) {
                           return factorKey(leaves[a]) < factorKey(leaves[b]);
                         });
      }
      for (std::size_t i : ordered) target.rank[i] = next_rank++;
      target.groups.push_back(ordered.size());
    }
    return target;
  }

  void shapeTensorChain(const Position& p, const ChainRules& rules) {
    flatten(p, rules);
    const auto leaf_positions = chainLeaves(p, rules.symbol);
    std::vector<Term> leaves;
    for (const Position& q : leaf_positions) leaves.push_back(at(q));
    const std::size_t n = leaves.size();

    std::optional<TensorTarget> target;
    if (rules.symbol == Symbol::TensorV) target = operatorTarget(p, leaves);
    if (!target) {
      std::vector<FactorKey> keys;
      for (const Term& l : leaves) keys.push_back(factorKey(l));
      target = TensorTarget{ranksFromKeys(keys), {n}};
    }
    sortChain(p, target->rank, rules);

    // Regroup: sym(G1, sym(G2, ...)) with each group right-nested.
    Position q = p;
    std::size_t remaining = n;
    for (std::size_t size : target->groups) {
      if (size == remaining) break;
      for (std::size_t k = 1; k < size; ++k) {
        apply(rules.assoc, Direction::Forward, q);
      }
      if (size > 1) flatten(q.child(1), rules);
      remaining -= size;
      q = q.child(2);
    }
  }

  // ------------------------------------------------------------ sums

  struct Summand {
    std::optional<Term> coeff;  // nullopt means an implicit 1
    std::string key;
  };

  Summand describe(const Term& s, Symbol times) const {
    if (s.isApp(times)) return {s.arg(1), renderCanonical(s.arg(2))};
    return {std::nullopt, renderCanonical(s)};
  }

  std::vector<Summand> summands(const Position& p, const SumRules& rules) {
    std::vector<Summand> out;
    for (const Position& q : chainLeaves(p, rules.chain.symbol)) {
      out.push_back(describe(at(q), rules.times));
    }
    return out;
  }

  void collectSum(const Position& p, const SumRules& rules) {
    flatten(p, rules.chain);
    auto items = summands(p, rules);
    std::size_t n = items.size();

    if (n > 1) {
      std::vector<FactorKey> keys;
      for (const auto& s : items) keys.push_back({{}, s.key});
      sortChain(p, ranksFromKeys(keys), rules.chain);
      items = summands(p, rules);
    }

    // Merge neighbours with the same monomial.
    for (std::size_t i = 0; i + 1 < n;) {
      if (items[i].key != items[i + 1].key) {
        ++i;
        continue;
      }
      for (std::size_t k : {i, i + 1}) {
        if (!items[k].coeff) {
          apply(rules.unit, Direction::Reverse, leafPosition(p, k, n));
        }
      }
      const Position node = chainNode(p, i);
      Position merged;
      if (i + 2 == n) {
        apply(rules.collect, Direction::Reverse, node);
        merged = node;
      } else {
        apply(rules.chain.assoc, Direction::Forward, node);
        apply(rules.collect, Direction::Reverse, node.child(1));
        merged = node.child(1);
      }
      tryApply(kScalarNormalize, Direction::Forward, merged.child(1));
      --n;
      items = summands(p, rules);
    }

    // Drop zero summands, keeping one if everything cancels.
    for (std::size_t i = n; i-- > 0;) {
      if (n == 1) break;
      if (!items[i].coeff || !isLiteral(*items[i].coeff, 0)) continue;
      if (i + 1 == n) {
        apply(rules.zero, Direction::Forward, chainNode(p, n - 2));
      } else {
        const Position node = chainNode(p, i);
        apply(rules.chain.commute, Direction::Forward, node);
        apply(rules.zero, Direction::Forward, node);
      }
      --n;
      items = summands(p, rules);
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (items[i].coeff && isLiteral(*items[i].coeff, 1)) {
        apply(rules.unit, Direction::Forward, leafPosition(p, i, n));
      }
    }
  }

  Term term_;
  const Registry& registry_;
  const NormalizeConfig& config_;
  std::vector<RewriteStep> steps_;
  std::map<Symbol, std::vector<std::string>> by_head_;
};

}  // namespace

Registry effectiveRegistry(const Registry& registry,
                           const NormalizeConfig& config) {
  Registry out = registry;
  for (const std::string& id : config.optionalRules) {
    out = out.withOptional(id);
  }
  return out;
}

NormalizeResult normalize(const Term& t, const Registry& registry,
                          const NormalizeConfig& config) {
  sortOf(t);
  if (config.optionalRules.empty()) {
    return Normalizer(t, registry, config).run();
  }
  const Registry effective = effectiveRegistry(registry, config);
  return Normalizer(t, effective, config).run();
}

Term replay(const Term& initial, const std::vector<RewriteStep>& steps,
            const Registry& registry) {
  Term current = initial;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      current = applyRule(current, steps[i], registry);
    } catch (const Error& e) {
      throw ReplayError(i, e.what());
    }
  }
  return current;
}

bool equivalent(const Term& a, const Term& b, const Registry& registry,
                const NormalizeConfig& config) {
  const Sort sa = sortOf(a);
  const Sort sb = sortOf(b);
  if (sa != sb) {
    throw SortError("eps", "cannot compare " + sa.toString() + " with " +
                               sb.toString());
  }
  return normalize(a, registry, config).term ==
         normalize(b, registry, config).term;
}

}  // namespace qrw
