#include "qrw/syntax.hpp"

#include <cctype>
#include <sstream>

namespace qrw {

namespace {

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool isNumericChar(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '+' ||
         c == '-' || c == '*' || c == 'i' || c == 's' || c == 'q' ||
         c == 'r' || c == 't';
}

class TermParser {
 public:
  TermParser(std::string_view input, bool patterns)
      : in_(input), patterns_(patterns) {}

  Term parseAll() {
    skipSpace();
    Position root;
    Term t = parseTermAt(root);
    skipSpace();
    if (pos_ != in_.size()) fail(pos_, pos_ + 1, "end of input");
    return t;
  }

 private:
  [[noreturn]] void fail(std::size_t start, std::size_t end,
                         const std::string& expected) const {
    if (end > in_.size()) end = in_.size();
    if (start > end) start = end;
    throw ParseError({start, end}, expected);
  }

  void skipSpace() {
    while (pos_ < in_.size() &&
           std::isspace(static_cast<unsigned char>(in_[pos_])))
      ++pos_;
  }

  bool atEnd() const { return pos_ >= in_.size(); }

  void expect(char c) {
    skipSpace();
    if (atEnd() || in_[pos_] != c) fail(pos_, pos_ + 1, std::string("'") + c + "'");
    ++pos_;
  }

  std::string readName(const char* what) {
    const std::size_t start = pos_;
    while (!atEnd() && isNameChar(in_[pos_])) ++pos_;
    if (pos_ == start) fail(start, start + 1, what);
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string readLabel() {
    const std::size_t start = pos_;
    std::string prefix;
    if (!atEnd() && in_[pos_] == '$') {
      if (!patterns_) fail(start, start + 1, "space label");
      ++pos_;
      prefix = "$";
      if (!atEnd() && in_[pos_] == '$') {
        ++pos_;
        prefix = "$$";
      }
    }
    const std::size_t name_start = pos_;
    while (!atEnd() && (std::isalnum(static_cast<unsigned char>(in_[pos_])) ||
                        in_[pos_] == '_'))
      ++pos_;
    if (pos_ == name_start) fail(start, pos_ + 1, "space label");
    return prefix + std::string(in_.substr(name_start, pos_ - name_start));
  }

  std::vector<std::string> readSpace() {
    std::vector<std::string> labels{readLabel()};
    while (!atEnd() && in_[pos_] == '*') {
      ++pos_;
      labels.push_back(readLabel());
    }
    return labels;
  }

  Term parseTermAt(Position& here) {
    skipSpace();
    if (atEnd()) fail(pos_, pos_, "term");
    const std::size_t start = pos_;
    const char c = in_[pos_];
    if ((c == 'V' || c == 'O' || c == 'S') && pos_ + 1 < in_.size() &&
        (in_[pos_ + 1] == ':' || in_[pos_ + 1] == '?')) {
      return parseLeaf();
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      return parseNumeric();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t look = pos_;
      while (look < in_.size() && isNameChar(in_[look])) ++look;
      const std::string_view word = in_.substr(pos_, look - pos_);
      std::size_t after = look;
      while (after < in_.size() &&
             std::isspace(static_cast<unsigned char>(in_[after])))
        ++after;
      const bool call = after < in_.size() && in_[after] == '(';
      if (!call && (word == "i" || word == "sqrt2" ||
                    word.substr(0, 1) == "i" || word.substr(0, 5) == "sqrt2")) {
        return parseNumeric();
      }
      auto sym = symbolFromName(word);
      if (!sym) fail(start, look, "function symbol or constant");
      pos_ = look;
      expect('(');
      std::vector<Term> args;
      for (std::size_t i = 0; i < arity(*sym); ++i) {
        if (i) expect(',');
        here.path.push_back(i + 1);
        args.push_back(parseTermAt(here));
        here.path.pop_back();
      }
      skipSpace();
      if (!atEnd() && in_[pos_] == ',') {
        fail(pos_, pos_ + 1,
             "')' (" + std::string(word) + " takes " +
                 std::to_string(arity(*sym)) + " arguments)");
      }
      expect(')');
      try {
        return Term::app(*sym, std::move(args));
      } catch (const SortError& e) {
        throw SortError(here.toString(), e.reason(), {start, pos_});
      }
    }
    fail(start, start + 1, "term");
  }

  Term parseNumeric() {
    const std::size_t start = pos_;
    while (!atEnd() && isNumericChar(in_[pos_])) ++pos_;
    const std::string text(in_.substr(start, pos_ - start));
    auto value = Coefficient::parse(text);
    if (!value) fail(start, pos_ == start ? start + 1 : pos_, "numeric literal");
    return Term::numeric(*value);
  }

  Term parseLeaf() {
    const std::size_t start = pos_;
    const char head = in_[pos_];
    const bool variable = in_[pos_ + 1] == '?';
    pos_ += 2;
    if (variable && !patterns_) fail(start, pos_, "constant (variables only in rules)");
    std::string name = readName("name");
    if (head == 'S') {
      if (variable) return Term::variable(std::move(name), SortKind::Scalar);
      return Term::scalarAtom(std::move(name));
    }
    std::optional<std::string> tag;
    if (!variable && head == 'V' && !atEnd() && in_[pos_] == '#') {
      ++pos_;
      const std::size_t tag_start = pos_;
      while (!atEnd() && isNameChar(in_[pos_])) ++pos_;
      tag = std::string(in_.substr(tag_start, pos_ - tag_start));
    }
    const SortKind kind = head == 'V' ? SortKind::Vector : SortKind::Operator;
    if (variable) {
      std::vector<std::string> ports;
      if (!atEnd() && in_[pos_] == '@') {
        ++pos_;
        ports = readSpace();
      }
      return Term::variable(std::move(name), kind, std::move(ports));
    }
    if (atEnd() || in_[pos_] != '@') fail(pos_, pos_ + 1, "'@' and a space");
    ++pos_;
    auto ports = readSpace();
    if (kind == SortKind::Vector) {
      return Term::vector(std::move(name), std::move(ports), std::move(tag));
    }
    return Term::op(std::move(name), std::move(ports));
  }

  std::string_view in_;
  bool patterns_;
  std::size_t pos_ = 0;
};

std::string joinPorts(const std::vector<std::string>& ports) {
  std::string out;
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (i) out += '*';
    out += ports[i];
  }
  return out;
}

std::string defaultTag(const std::string& name) {
  return (name == "0" || name == "1") ? "computational" : "";
}

void renderCanonicalInto(const Term& t, std::string& out) {
  switch (t.kind()) {
    case NodeKind::Variable:
      out += t.sortKind() == SortKind::Scalar   ? "S?"
             : t.sortKind() == SortKind::Vector ? "V?"
                                                : "O?";
      out += t.name();
      if (!t.ports().empty()) out += "@" + joinPorts(t.ports());
      return;
    case NodeKind::ScalarAtom:
      out += "S:" + t.name();
      return;
    case NodeKind::Numeric:
      out += t.value().toString();
      return;
    case NodeKind::ConstVector:
      out += "V:" + t.name();
      if (t.basisTag() != defaultTag(t.name())) out += "#" + t.basisTag();
      out += "@" + joinPorts(t.ports());
      return;
    case NodeKind::ConstOperator:
      out += "O:" + t.name() + "@" + joinPorts(t.ports());
      return;
    case NodeKind::Application:
      out += symbolName(t.symbol());
      out += '(';
      for (std::size_t i = 0; i < t.args().size(); ++i) {
        if (i) out += ", ";
        renderCanonicalInto(t.args()[i], out);
      }
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------- Dirac

std::string subscript(const std::vector<std::string>& ports) {
  if (ports.size() == 1) return "_" + ports.front();
  std::string out = "_{";
  for (std::size_t i = 0; i < ports.size(); ++i) {
    if (i) out += ',';
    out += ports[i];
  }
  return out + "}";
}

class DiracWriter {
 public:
  DiracRendering run(const Term& t) {
    Position root;
    write(t, root, /*bare=*/true);
    return {std::move(out_), std::move(spans_)};
  }

 private:
  bool isAtomic(const Term& t) const {
    return t.kind() != NodeKind::Application || t.isApp(Symbol::Ip) ||
           t.isApp(Symbol::Projector) || t.isApp(Symbol::Conjugate);
  }

  // `bare` marks contexts that already supply delimiters (the root and the
  // argument of an operator application).
  void write(const Term& t, Position& here, bool bare) {
    const bool wrap = !bare && !isAtomic(t);
    if (wrap) out_ += '(';
    const std::size_t index = spans_.size();
    spans_.push_back({here, out_.size(), 0});
    writeBody(t, here);
    spans_[index].end = out_.size();
    if (wrap) out_ += ')';
  }

  void child(const Term& t, Position& here, std::size_t i, bool bare) {
    here.path.push_back(i);
    write(t.arg(i), here, bare);
    here.path.pop_back();
  }

  void writeBody(const Term& t, Position& here) {
    switch (t.kind()) {
      case NodeKind::Variable:
        out_ += t.name();
        return;
      case NodeKind::ScalarAtom:
        out_ += t.name();
        return;
      case NodeKind::Numeric:
        out_ += t.value().toString(true);
        return;
      case NodeKind::ConstVector:
        out_ += "|" + t.name() + "⟩" + subscript(t.ports());
        return;
      case NodeKind::ConstOperator:
        out_ += t.name() + "̂" + subscript(t.ports());
        return;
      case NodeKind::Application:
        break;
    }
    switch (t.symbol()) {
      case Symbol::Conjugate:
        child(t, here, 1, false);
        out_ += "*";
        return;
      case Symbol::PlusS:
      case Symbol::PlusV:
      case Symbol::PlusO:
        child(t, here, 1, false);
        out_ += " + ";
        child(t, here, 2, false);
        return;
      case Symbol::TimesS:
      case Symbol::TimesV:
      case Symbol::TimesO:
        child(t, here, 1, false);
        out_ += " ";
        child(t, here, 2, false);
        return;
      case Symbol::Ip:
        out_ += "⟨";
        writeBraKet(t, here, 1);
        out_ += ",";
        writeBraKet(t, here, 2);
        out_ += "⟩";
        return;
      case Symbol::Apply:
        child(t, here, 1, false);
        out_ += " (";
        child(t, here, 2, true);
        out_ += ")";
        return;
      case Symbol::Compose:
        child(t, here, 1, false);
        out_ += " · ";
        child(t, here, 2, false);
        return;
      case Symbol::Projector:
        child(t, here, 1, false);
        writeBra(t, here, 2);
        return;
      case Symbol::TensorV:
      case Symbol::TensorO:
        child(t, here, 1, false);
        out_ += " ⊗ ";
        child(t, here, 2, false);
        return;
    }
  }

  // Inside ⟨x,y⟩ constants show by name only.
  void writeBraKet(const Term& t, Position& here, std::size_t i) {
    const Term& a = t.arg(i);
    if (a.kind() == NodeKind::ConstVector) {
      here.path.push_back(i);
      spans_.push_back({here, out_.size(), 0});
      out_ += a.name();
      spans_.back().end = out_.size();
      here.path.pop_back();
    } else {
      child(t, here, i, true);
    }
  }

  void writeBra(const Term& t, Position& here, std::size_t i) {
    const Term& a = t.arg(i);
    here.path.push_back(i);
    if (a.kind() == NodeKind::ConstVector) {
      spans_.push_back({here, out_.size(), 0});
      out_ += "⟨" + a.name() + "|" + subscript(a.ports());
      spans_.back().end = out_.size();
    } else {
      out_ += "(";
      write(a, here, true);
      out_ += ")†";
    }
    here.path.pop_back();
  }

  std::string out_;
  std::vector<DiracSpan> spans_;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Term parseTerm(std::string_view input) {
  return TermParser(input, false).parseAll();
}

Term parsePattern(std::string_view input) {
  return TermParser(input, true).parseAll();
}

std::string renderCanonical(const Term& t) {
  std::string out;
  renderCanonicalInto(t, out);
  return out;
}

std::string renderDirac(const Term& t) { return DiracWriter().run(t).text; }

DiracRendering renderDiracWithSpans(const Term& t) {
  return DiracWriter().run(t);
}

std::string_view directionName(Direction d) {
  return d == Direction::Forward ? "fwd" : "rev";
}

// ---------------------------------------------------------------- files

namespace {

constexpr std::string_view kHeader = "qrewrite-derivation v1";

struct Line {
  std::size_t number;
  std::size_t offset;
  std::string_view text;
};

std::vector<Line> splitLines(std::string_view input) {
  std::vector<Line> lines;
  std::size_t start = 0, number = 1;
  while (start <= input.size()) {
    std::size_t end = input.find('\n', start);
    if (end == std::string_view::npos) end = input.size();
    std::string_view text = input.substr(start, end - start);
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    lines.push_back({number++, start, text});
    if (end == input.size()) break;
    start = end + 1;
  }
  return lines;
}

bool skippable(std::string_view text) {
  const std::string t = trim(text);
  return t.empty() || t.front() == '#';
}

}  // namespace

DerivationDocument parseDerivation(std::string_view input) {
  DerivationDocument doc;
  const auto lines = splitLines(input);
  const auto lineError = [](const Line& l, const std::string& expected) {
    return ParseError({l.offset, l.offset + l.text.size()}, expected,
                      l.number);
  };
  bool seen_header = false, seen_initial = false;
  for (const Line& line : lines) {
    if (skippable(line.text)) continue;
    const std::string text = trim(line.text);
    if (!seen_header) {
      if (text != kHeader) throw lineError(line, std::string(kHeader));
      seen_header = true;
      continue;
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw lineError(line, "'initial:', 'step:' or 'expect:'");
    }
    const std::string key = text.substr(0, colon);
    const std::string value = trim(std::string_view(text).substr(colon + 1));
    if (key == "initial") {
      if (seen_initial) throw lineError(line, "a single 'initial:' line");
      doc.initial = value;
      seen_initial = true;
    } else if (key == "step") {
      if (!seen_initial || doc.expect) {
        throw lineError(line, "'step:' between 'initial:' and 'expect:'");
      }
      std::istringstream fields(value);
      std::string id, dir, pos, extra;
      fields >> id >> dir >> pos;
      if (id.empty() || pos.empty() || (fields >> extra)) {
        throw lineError(line, "step: <ruleId> <fwd|rev> <position>");
      }
      RewriteStep step;
      step.ruleId = id;
      if (dir == "fwd") {
        step.direction = Direction::Forward;
      } else if (dir == "rev") {
        step.direction = Direction::Reverse;
      } else {
        throw lineError(line, "direction fwd or rev");
      }
      auto p = Position::parse(pos);
      if (!p) throw lineError(line, "position (eps or dotted 1-based path)");
      step.position = *p;
      doc.steps.push_back(std::move(step));
    } else if (key == "expect") {
      if (!seen_initial || doc.expect) {
        throw lineError(line, "a single 'expect:' after 'initial:'");
      }
      doc.expect = value;
    } else {
      throw lineError(line, "'initial:', 'step:' or 'expect:'");
    }
  }
  if (!seen_header) {
    throw ParseError({0, input.size()}, std::string(kHeader), 1);
  }
  if (!seen_initial) {
    throw ParseError({0, input.size()}, "'initial:' line",
                     lines.empty() ? 1 : lines.back().number);
  }
  return doc;
}

std::string renderDerivation(const DerivationDocument& doc) {
  std::string out(kHeader);
  out += "\ninitial: " + doc.initial + "\n";
  for (const auto& s : doc.steps) {
    out += "step: " + s.ruleId + " " + std::string(directionName(s.direction)) +
           " " + s.position.toString() + "\n";
  }
  if (doc.expect) out += "expect: " + *doc.expect + "\n";
  return out;
}

std::vector<RuleText> parseRuleFile(std::string_view input) {
  std::vector<RuleText> rules;
  for (const Line& line : splitLines(input)) {
    if (skippable(line.text)) continue;
    const std::string text = trim(line.text);
    const auto fail = [&](const std::string& expected) {
      return ParseError({line.offset, line.offset + line.text.size()},
                        expected, line.number);
    };
    if (text.rfind("rule ", 0) != 0) throw fail("rule <id>: <lhs> -> <rhs>");
    const auto colon = text.find(':', 5);
    if (colon == std::string::npos) throw fail("':' after the rule id");
    RuleText rule;
    rule.id = trim(std::string_view(text).substr(5, colon - 5));
    if (rule.id.empty()) throw fail("rule id");
    const std::string body = text.substr(colon + 1);
    auto arrow = body.find("<->");
    std::size_t width = 3;
    rule.bidirectional = arrow != std::string::npos;
    if (!rule.bidirectional) {
      arrow = body.find("->");
      width = 2;
    }
    if (arrow == std::string::npos) throw fail("'->' or '<->'");
    rule.lhs = trim(std::string_view(body).substr(0, arrow));
    rule.rhs = trim(std::string_view(body).substr(arrow + width));
    if (rule.lhs.empty() || rule.rhs.empty()) throw fail("both rule sides");
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace qrw
