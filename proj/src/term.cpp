#include "qrw/term.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <stdexcept>

namespace qrw {

namespace detail {

struct Node {
  NodeKind kind;
  Symbol symbol = Symbol::Conjugate;
  std::string name;
  std::string tag;
  std::vector<std::string> ports;
  std::optional<Coefficient> value;
  std::vector<Term> args;
  SortKind sort_kind = SortKind::Scalar;
  std::optional<Space> space;
  bool ground = true;
  std::size_t node_count = 1;
  std::size_t hash = 0;
};

}  // namespace detail

namespace {

std::size_t mix(std::size_t seed, std::size_t value) {
  return seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hashString(const std::string& s) {
  return std::hash<std::string>{}(s);
}

// Result sort of a signature symbol; throws SortError with an empty
// position that callers fill in.
PatternSort signatureResult(Symbol sym, const std::vector<PatternSort>& args) {
  const auto need = [&](std::size_t i, SortKind kind) {
    if (args[i].kind != kind) {
      throw SortError("", std::string(symbolName(sym)) + " argument " +
                              std::to_string(i + 1) + " must be " +
                              kindName(kind) + ", got " +
                              kindName(args[i].kind));
    }
  };
  const auto same = [&]() -> std::optional<Space> {
    if (!args[0].space || !args[1].space) {
      return args[0].space ? args[0].space : args[1].space;
    }
    if (*args[0].space != *args[1].space) {
      throw SortError("", std::string(symbolName(sym)) +
                              " requires one space, got " +
                              args[0].space->toString() + " and " +
                              args[1].space->toString());
    }
    return args[0].space;
  };
  switch (sym) {
    case Symbol::Conjugate:
      need(0, SortKind::Scalar);
      return {SortKind::Scalar, Space{}};
    case Symbol::PlusS:
    case Symbol::TimesS:
      need(0, SortKind::Scalar);
      need(1, SortKind::Scalar);
      return {SortKind::Scalar, Space{}};
    case Symbol::PlusV:
      need(0, SortKind::Vector);
      need(1, SortKind::Vector);
      return {SortKind::Vector, same()};
    case Symbol::TimesV:
      need(0, SortKind::Scalar);
      need(1, SortKind::Vector);
      return {SortKind::Vector, args[1].space};
    case Symbol::PlusO:
    case Symbol::Compose:
      need(0, SortKind::Operator);
      need(1, SortKind::Operator);
      return {SortKind::Operator, same()};
    case Symbol::TimesO:
      need(0, SortKind::Scalar);
      need(1, SortKind::Operator);
      return {SortKind::Operator, args[1].space};
    case Symbol::Ip:
      need(0, SortKind::Vector);
      need(1, SortKind::Vector);
      same();
      return {SortKind::Scalar, Space{}};
    case Symbol::Apply:
      need(0, SortKind::Operator);
      need(1, SortKind::Vector);
      return {SortKind::Vector, same()};
    case Symbol::Projector:
      need(0, SortKind::Vector);
      need(1, SortKind::Vector);
      return {SortKind::Operator, same()};
    case Symbol::TensorV:
    case Symbol::TensorO: {
      const SortKind k =
          sym == Symbol::TensorV ? SortKind::Vector : SortKind::Operator;
      need(0, k);
      need(1, k);
      if (!args[0].space || !args[1].space) return {k, std::nullopt};
      return {k, tensorSpace(*args[0].space, *args[1].space)};
    }
  }
  throw std::logic_error("unhandled symbol");
}

}  // namespace

// ---------------------------------------------------------------- Space

Space::Space(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
}

bool Space::hasDuplicates() const {
  return std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end();
}

std::string Space::toString() const {
  std::string out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (i) out += '*';
    out += labels_[i];
  }
  return out;
}

Space tensorSpace(const Space& lhs, const Space& rhs) {
  std::vector<std::string> joined;
  joined.reserve(lhs.size() + rhs.size());
  std::merge(lhs.labels().begin(), lhs.labels().end(), rhs.labels().begin(),
             rhs.labels().end(), std::back_inserter(joined));
  return Space(std::move(joined));
}

const char* kindName(SortKind kind) {
  switch (kind) {
    case SortKind::Scalar:
      return "scalar";
    case SortKind::Vector:
      return "vector";
    case SortKind::Operator:
      return "operator";
  }
  return "?";
}

std::string Sort::toString() const {
  if (kind == SortKind::Scalar) return "scalar";
  return std::string(kindName(kind)) + "[" + space.toString() + "]";
}

// ---------------------------------------------------------------- Symbol

namespace {
struct SymbolInfo {
  Symbol symbol;
  std::string_view name;
  std::size_t arity;
  SortKind result;
};

constexpr SymbolInfo kSymbols[] = {
    {Symbol::Conjugate, "conjugate", 1, SortKind::Scalar},
    {Symbol::PlusS, "plusS", 2, SortKind::Scalar},
    {Symbol::TimesS, "timesS", 2, SortKind::Scalar},
    {Symbol::PlusV, "plusV", 2, SortKind::Vector},
    {Symbol::TimesV, "timesV", 2, SortKind::Vector},
    {Symbol::PlusO, "plusO", 2, SortKind::Operator},
    {Symbol::TimesO, "timesO", 2, SortKind::Operator},
    {Symbol::Ip, "ip", 2, SortKind::Scalar},
    {Symbol::Apply, "apply", 2, SortKind::Vector},
    {Symbol::Compose, "compose", 2, SortKind::Operator},
    {Symbol::Projector, "projector", 2, SortKind::Operator},
    {Symbol::TensorV, "tensorV", 2, SortKind::Vector},
    {Symbol::TensorO, "tensorO", 2, SortKind::Operator},
};

const SymbolInfo& info(Symbol s) {
  return kSymbols[static_cast<std::size_t>(s)];
}
}  // namespace

std::string_view symbolName(Symbol s) { return info(s).name; }
std::size_t arity(Symbol s) { return info(s).arity; }
SortKind resultKind(Symbol s) { return info(s).result; }

std::optional<Symbol> symbolFromName(std::string_view name) {
  for (const auto& entry : kSymbols) {
    if (entry.name == name) return entry.symbol;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- Position

Position Position::child(std::size_t index) const {
  Position p = *this;
  p.path.push_back(index);
  return p;
}

Position Position::parent() const {
  Position p = *this;
  if (!p.path.empty()) p.path.pop_back();
  return p;
}

bool Position::isPrefixOf(const Position& other) const {
  return path.size() <= other.path.size() &&
         std::equal(path.begin(), path.end(), other.path.begin());
}

std::string Position::toString() const {
  if (path.empty()) return "eps";
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(path[i]);
  }
  return out;
}

std::optional<Position> Position::parse(std::string_view text) {
  if (text == "eps" || text == "ε") return Position{};
  Position p;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t value = 0;
    const char* begin = text.data() + pos;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || value == 0) return std::nullopt;
    p.path.push_back(value);
    pos += static_cast<std::size_t>(ptr - begin);
    if (pos == text.size()) return p;
    if (text[pos] != '.' && text[pos] != ',') return std::nullopt;
    ++pos;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------- Term

namespace {

std::optional<Space> portSpace(const std::vector<std::string>& ports) {
  if (ports.empty()) return std::nullopt;
  return Space(ports);
}

bool portsGround(const std::vector<std::string>& ports) {
  return std::none_of(ports.begin(), ports.end(),
                      [](const std::string& p) { return isMetaLabel(p); });
}

}  // namespace

Term Term::variable(std::string name, SortKind kind,
                    std::vector<std::string> ports) {
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::Variable;
  n->name = std::move(name);
  n->sort_kind = kind;
  if (kind != SortKind::Scalar) {
    n->space = portSpace(ports);
  } else {
    n->space = Space{};
  }
  n->ports = std::move(ports);
  n->ground = false;
  n->hash = mix(mix(1, hashString(n->name)), static_cast<std::size_t>(kind));
  for (const auto& p : n->ports) n->hash = mix(n->hash, hashString(p));
  return Term(std::move(n));
}

Term Term::scalarAtom(std::string name) {
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::ScalarAtom;
  n->name = std::move(name);
  n->space = Space{};
  n->hash = mix(2, hashString(n->name));
  return Term(std::move(n));
}

Term Term::numeric(Coefficient value) {
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::Numeric;
  n->hash = mix(3, hashString(value.toString()));
  n->value = std::move(value);
  n->space = Space{};
  return Term(std::move(n));
}

Term Term::vector(std::string name, std::vector<std::string> ports,
                  std::optional<std::string> basis_tag) {
  if (ports.empty()) {
    throw SortError("eps", "vector constant " + name + " needs a space");
  }
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::ConstVector;
  if (basis_tag) {
    n->tag = *basis_tag;
  } else if (name == "0" || name == "1") {
    n->tag = "computational";
  }
  n->name = std::move(name);
  n->sort_kind = SortKind::Vector;
  n->space = Space(ports);
  n->ground = portsGround(ports);
  n->ports = std::move(ports);
  n->hash = mix(mix(4, hashString(n->name)), hashString(n->tag));
  for (const auto& p : n->ports) n->hash = mix(n->hash, hashString(p));
  return Term(std::move(n));
}

Term Term::op(std::string name, std::vector<std::string> ports) {
  if (ports.empty()) {
    throw SortError("eps", "operator constant " + name + " needs a space");
  }
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::ConstOperator;
  n->name = std::move(name);
  n->sort_kind = SortKind::Operator;
  n->space = Space(ports);
  n->ground = portsGround(ports);
  n->ports = std::move(ports);
  n->hash = mix(5, hashString(n->name));
  for (const auto& p : n->ports) n->hash = mix(n->hash, hashString(p));
  return Term(std::move(n));
}

Term Term::app(Symbol symbol, std::vector<Term> args) {
  if (args.size() != arity(symbol)) {
    throw std::invalid_argument(std::string(symbolName(symbol)) + " takes " +
                                std::to_string(arity(symbol)) + " arguments");
  }
  std::vector<PatternSort> arg_sorts;
  arg_sorts.reserve(args.size());
  auto n = std::make_shared<detail::Node>();
  n->kind = NodeKind::Application;
  n->symbol = symbol;
  n->hash = mix(6, static_cast<std::size_t>(symbol));
  for (const Term& a : args) {
    arg_sorts.push_back({a.sortKind(), a.space()});
    n->ground = n->ground && a.isGround();
    n->node_count += a.nodeCount();
    n->hash = mix(n->hash, a.hash());
  }
  PatternSort result;
  try {
    result = signatureResult(symbol, arg_sorts);
  } catch (const SortError& e) {
    throw SortError("eps", e.reason());
  }
  n->sort_kind = result.kind;
  n->space = result.space;
  n->args = std::move(args);
  return Term(std::move(n));
}

NodeKind Term::kind() const { return node_->kind; }
bool Term::isApp(Symbol s) const {
  return node_->kind == NodeKind::Application && node_->symbol == s;
}
Symbol Term::symbol() const { return node_->symbol; }
const std::string& Term::name() const { return node_->name; }
const std::string& Term::basisTag() const { return node_->tag; }
const std::vector<std::string>& Term::ports() const { return node_->ports; }
const Coefficient& Term::value() const { return *node_->value; }
const std::vector<Term>& Term::args() const { return node_->args; }
const Term& Term::arg(std::size_t one_based) const {
  return node_->args.at(one_based - 1);
}
bool Term::isGround() const { return node_->ground; }
SortKind Term::sortKind() const { return node_->sort_kind; }
const std::optional<Space>& Term::space() const { return node_->space; }
Sort Term::sort() const {
  return Sort{node_->sort_kind, node_->space.value_or(Space{})};
}
std::size_t Term::nodeCount() const { return node_->node_count; }
std::size_t Term::hash() const { return node_->hash; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const detail::Node& x = *a.node_;
  const detail::Node& y = *b.node_;
  if (x.hash != y.hash || x.kind != y.kind || x.node_count != y.node_count)
    return false;
  switch (x.kind) {
    case NodeKind::Variable:
      return x.name == y.name && x.sort_kind == y.sort_kind &&
             x.ports == y.ports;
    case NodeKind::ScalarAtom:
      return x.name == y.name;
    case NodeKind::Numeric:
      return *x.value == *y.value;
    case NodeKind::ConstVector:
      return x.name == y.name && x.tag == y.tag && x.ports == y.ports;
    case NodeKind::ConstOperator:
      return x.name == y.name && x.ports == y.ports;
    case NodeKind::Application:
      return x.symbol == y.symbol && x.args == y.args;
  }
  return false;
}

// ---------------------------------------------------------------- queries

namespace {

PatternSort sortAt(const Term& t, const Position& here, bool ground_only) {
  switch (t.kind()) {
    case NodeKind::Variable:
      if (ground_only) {
        throw SortError(here.toString(), "variable " + t.name() +
                                             " in a ground term");
      }
      return {t.sortKind(), t.space()};
    case NodeKind::ScalarAtom:
    case NodeKind::Numeric:
      return {SortKind::Scalar, Space{}};
    case NodeKind::ConstVector:
    case NodeKind::ConstOperator:
      if (ground_only && !t.isGround()) {
        throw SortError(here.toString(),
                        "space metavariable in a ground term");
      }
      return {t.sortKind(), Space(t.ports())};
    case NodeKind::Application: {
      std::vector<PatternSort> args;
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        args.push_back(sortAt(t.args()[i], here.child(i + 1), ground_only));
      }
      try {
        return signatureResult(t.symbol(), args);
      } catch (const SortError& e) {
        throw SortError(here.toString(), e.reason());
      }
    }
  }
  throw std::logic_error("unhandled node kind");
}

}  // namespace

Sort sortOf(const Term& t) {
  PatternSort s = sortAt(t, Position{}, true);
  return Sort{s.kind, s.space.value_or(Space{})};
}

PatternSort patternSortOf(const Term& t) { return sortAt(t, Position{}, false); }

bool isValidPosition(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t idx : p.path) {
    if (cur->kind() != NodeKind::Application || idx == 0 ||
        idx > cur->args().size()) {
      return false;
    }
    cur = &cur->args()[idx - 1];
  }
  return true;
}

const Term& subtermAt(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (std::size_t idx : p.path) {
    if (cur->kind() != NodeKind::Application || idx == 0 ||
        idx > cur->args().size()) {
      throw InvalidPosition(p.toString());
    }
    cur = &cur->args()[idx - 1];
  }
  return *cur;
}

namespace {

Term replaceFrom(const Term& t, const Position& p, std::size_t depth,
                 const Term& replacement) {
  if (depth == p.path.size()) return replacement;
  const std::size_t idx = p.path[depth];
  if (t.kind() != NodeKind::Application || idx == 0 || idx > t.args().size()) {
    throw InvalidPosition(p.toString());
  }
  std::vector<Term> args = t.args();
  args[idx - 1] = replaceFrom(args[idx - 1], p, depth + 1, replacement);
  return Term::app(t.symbol(), std::move(args));
}

}  // namespace

Term replaceAt(const Term& t, const Position& p, const Term& replacement) {
  const Term& old = subtermAt(t, p);
  if (old.isGround() && replacement.isGround() &&
      old.sort() != replacement.sort()) {
    throw SortError(p.toString(), "replacement has sort " +
                                      replacement.sort().toString() +
                                      ", expected " + old.sort().toString());
  }
  return replaceFrom(t, p, 0, replacement);
}

namespace {
void collectPositions(const Term& t, Position& here,
                      std::vector<Position>& out) {
  out.push_back(here);
  if (t.kind() != NodeKind::Application) return;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    here.path.push_back(i + 1);
    collectPositions(t.args()[i], here, out);
    here.path.pop_back();
  }
}
}  // namespace

std::vector<Position> positionsOf(const Term& t) {
  std::vector<Position> out;
  out.reserve(t.nodeCount());
  Position here;
  collectPositions(t, here, out);
  return out;
}

}  // namespace qrw
