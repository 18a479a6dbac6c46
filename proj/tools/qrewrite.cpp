// qrewrite: check, normalize and replay terms, run the rule soundness
// suite, drive derivations interactively or serve them over HTTP.
//
// Exit codes: 0 success, 1 verification or sort failure, 2 parse failure
// (including unreadable input), 3 resource limit.

#include <unistd.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qrw/interp.hpp"
#include "qrw/json.hpp"
#include "qrw/server.hpp"
#include "qrw/session.hpp"
#include "qrw/strategy.hpp"
#include "qrw/syntax.hpp"

namespace {

using namespace qrw;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kParse = 2;
constexpr int kLimit = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readInput(const std::string& path) {
  std::ostringstream buf;
  if (path.empty() || path == "-") {
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  buf << in.rdbuf();
  return buf.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Prints the offending line of `input` with the span underlined.
void showSpan(std::ostream& out, std::string_view input, SourceSpan span) {
  const std::size_t start = std::min(span.start, input.size());
  const std::size_t line_begin = input.rfind('\n', start == 0 ? 0 : start - 1);
  const std::size_t from = line_begin == std::string_view::npos || start == 0
                               ? 0
                               : line_begin + 1;
  std::size_t to = input.find('\n', start);
  if (to == std::string_view::npos) to = input.size();
  out << "  " << input.substr(from, to - from) << "\n  "
      << std::string(start - from, ' ')
      << std::string(std::max<std::size_t>(1, std::min(span.end, to) - start), '^')
      << "\n";
}

// Reports an engine error and maps it to an exit code.
int report(const Error& e, std::string_view input = {}) {
  std::cerr << e.kind() << ": " << e.what() << "\n";
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    if (!input.empty() && p->line() == 0) showSpan(std::cerr, input, p->span());
    return kParse;
  }
  if (const auto* s = dynamic_cast<const SortError*>(&e)) {
    if (!input.empty() && s->hasSpan()) showSpan(std::cerr, input, s->span());
    return kFailed;
  }
  if (dynamic_cast<const StepLimitExceeded*>(&e)) return kLimit;
  return kFailed;
}

struct Options {
  std::string rulesFile;
  std::vector<std::string> enable;
  std::size_t maxSteps = 10000;
  std::string format = "canonical";
};

std::shared_ptr<const Registry> buildRegistry(const Options& o) {
  Registry reg = defaultRegistry();
  if (!o.rulesFile.empty()) {
    reg = registerUserRules(std::move(reg), loadRuleFile(readInput(o.rulesFile)));
  }
  for (const auto& id : o.enable) reg = reg.withOptional(id);
  return std::make_shared<const Registry>(std::move(reg));
}

NormalizeConfig configOf(const Options& o) {
  NormalizeConfig c;
  c.maxSteps = o.maxSteps;
  return c;
}

std::string render(const Term& t, const std::string& format) {
  return format == "dirac" ? renderDirac(t) : renderCanonical(t);
}

// ---------------------------------------------------------------- commands

int cmdCheck(const Options&, const std::string& file) {
  const std::string input = readInput(file);
  try {
    const Term t = parseTerm(input);
    std::cout << t.sort().toString() << "\n";
    return kOk;
  } catch (const Error& e) {
    return report(e, input);
  }
}

int cmdNormalize(const Options& o, const std::string& file,
                 const std::string& dump) {
  const std::string input = readInput(file);
  try {
    const auto reg = buildRegistry(o);
    const Term t = parseTerm(input);
    const NormalizeResult r = normalize(t, *reg, configOf(o));
    std::cout << render(r.term, o.format) << "\n";
    std::cerr << "steps: " << r.derivation.steps.size() << "\n";
    if (!dump.empty()) {
      DerivationDocument doc{1, renderCanonical(t), r.derivation.steps,
                             renderCanonical(r.term)};
      writeFile(dump, renderDerivation(doc));
    }
    return kOk;
  } catch (const Error& e) {
    return report(e, input);
  }
}

int cmdReplay(const Options& o, const std::string& file) {
  const std::string input = readInput(file);
  DerivationDocument doc;
  try {
    doc = parseDerivation(input);
  } catch (const Error& e) {
    return report(e);
  }
  try {
    const auto reg = buildRegistry(o);
    const Term initial = parseTerm(doc.initial);
    const Term final_term = replay(initial, doc.steps, *reg);
    std::cout << render(final_term, o.format) << "\n";
    if (!doc.expect) {
      std::cerr << "replayed " << doc.steps.size() << " steps\n";
      return kOk;
    }
    const Term expected = parseTerm(*doc.expect);
    if (expected != final_term) {
      std::cerr << "mismatch: expected " << renderCanonical(expected) << "\n";
      return kFailed;
    }
    std::cerr << "replayed " << doc.steps.size()
              << " steps; final term matches expect\n";
    return kOk;
  } catch (const Error& e) {
    return report(e);
  }
}

int cmdSoundness(const Options& o, std::size_t trials, std::uint64_t seed,
                 const std::vector<std::string>& mutate, bool all,
                 const std::string& format) {
  const auto reg = buildRegistry(o);
  for (const auto& id : mutate) {
    if (!reg->find(id)) return report(UnknownRule(id));
  }
  std::vector<SoundnessReport> reports;
  for (const Rule* rule : reg->rules()) {
    const bool counted = rule->kind == RuleKind::Builtin || rule->kind == RuleKind::User;
    if (!counted && !all) continue;
    const bool mutated =
        std::find(mutate.begin(), mutate.end(), rule->id) != mutate.end();
    try {
      reports.push_back(checkRuleSoundness(mutated ? mutatedRule(*rule) : *rule,
                                           trials, seed));
    } catch (const Error& e) {
      return report(e);
    }
  }
  if (format == "json") {
    std::cout << soundnessToJson(reports).dump(2) << "\n";
  } else {
    std::cout << renderSoundnessText(reports);
  }
  for (const auto& r : reports) {
    if (!r.ok()) return kFailed;
  }
  return kOk;
}

const char* kindName(RuleKind k) {
  switch (k) {
    case RuleKind::Builtin: return "builtin";
    case RuleKind::User: return "user";
    case RuleKind::Optional: return "optional";
    case RuleKind::Support: return "support";
  }
  return "?";
}

int cmdRules(const Options& o) {
  const auto reg = buildRegistry(o);
  for (const Rule* r : reg->rules()) {
    std::cout << r->id << " [" << kindName(r->kind)
              << (reg->isEnabled(*r) ? "" : ", disabled") << "]\n  "
              << renderCanonical(r->lhs) << (r->bidirectional ? " <-> " : " -> ")
              << renderCanonical(r->rhs) << "\n";
  }
  std::cout << reg->size() << " rules (support rules not counted)\n";
  return kOk;
}

// ---------------------------------------------------------------- repl

class Repl {
 public:
  Repl(std::shared_ptr<const Registry> reg, NormalizeConfig config)
      : reg_(std::move(reg)), config_(std::move(config)) {}

  int run(std::istream& in, std::ostream& out) {
    const bool interactive = isatty(STDIN_FILENO);
    std::string line;
    while (true) {
      if (interactive) out << "qrewrite> " << std::flush;
      if (!std::getline(in, line)) break;
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      const auto space = line.find(' ');
      const std::string cmd = line.substr(0, space);
      const std::string arg =
          space == std::string::npos ? "" : trim(line.substr(space + 1));
      if (cmd == "quit" || cmd == "exit") break;
      try {
        dispatch(cmd, arg, out);
      } catch (const Error& e) {
        out << "error: " << e.kind() << ": " << e.what() << "\n";
        if (const auto* p = dynamic_cast<const ParseError*>(&e)) showSpan(out, arg, p->span());
        if (const auto* s = dynamic_cast<const SortError*>(&e); s && s->hasSpan()) {
          showSpan(out, arg, s->span());
        }
      } catch (const std::exception& e) {
        out << "error: " << e.what() << "\n";
      }
    }
    return kOk;
  }

 private:
  Session& session() {
    if (!session_) throw InputError("no term loaded; use: load <term>");
    return *session_;
  }

  void dispatch(const std::string& cmd, const std::string& arg,
                std::ostream& out) {
    if (cmd == "help") {
      out << "load <term> | show [dirac|canonical] | moves | apply <n> | "
             "apply <rule> <fwd|rev> <pos> | undo | normalize | save <file> | "
             "quit\n";
    } else if (cmd == "load") {
      session_.emplace(parseTerm(arg), reg_, config_);
      out << session_->current().sort().toString() << "\n";
      printCurrent(out);
    } else if (cmd == "show") {
      const std::string format = arg.empty() ? "dirac" : arg;
      if (format != "dirac" && format != "canonical") {
        throw InputError("show takes dirac or canonical");
      }
      out << render(session().current(), format) << "\n";
    } else if (cmd == "moves") {
      moves_ = session().moves();
      for (std::size_t i = 0; i < moves_.size(); ++i) {
        out << "  [" << i << "] " << moves_[i].ruleId << " "
            << directionName(moves_[i].direction) << " "
            << moves_[i].position.toString() << "\n";
      }
      if (moves_.empty()) out << "  (no applicable moves)\n";
    } else if (cmd == "apply") {
      session().apply(parseMove(arg));
      moves_.clear();
      printCurrent(out);
    } else if (cmd == "undo") {
      if (!session().undo()) throw InputError("nothing to undo");
      moves_.clear();
      printCurrent(out);
    } else if (cmd == "normalize") {
      const std::size_t added = session().normalize();
      moves_.clear();
      out << added << " steps\n";
      printCurrent(out);
    } else if (cmd == "save") {
      if (arg.empty()) throw InputError("save needs a file name");
      writeFile(arg, renderDerivation(session().derivation()));
      out << "saved " << session().stepCount() << " steps to " << arg << "\n";
    } else {
      throw InputError("unknown command " + cmd + " (try help)");
    }
  }

  RewriteStep parseMove(const std::string& arg) {
    std::istringstream words(arg);
    std::vector<std::string> w;
    for (std::string x; words >> x;) w.push_back(x);
    if (w.size() == 1) {
      if (moves_.empty()) moves_ = session().moves();
      std::size_t n = 0;
      try {
        n = std::stoul(w[0]);
      } catch (const std::exception&) {
        throw InputError("apply takes a move number");
      }
      if (n >= moves_.size()) throw InputError("no move " + w[0] + "; run moves");
      return moves_[n];
    }
    if (w.size() != 3 || (w[1] != "fwd" && w[1] != "rev")) {
      throw InputError("usage: apply <n> | apply <rule> <fwd|rev> <pos>");
    }
    auto pos = Position::parse(w[2]);
    if (!pos) throw InputError("bad position " + w[2]);
    return {w[0], w[1] == "fwd" ? Direction::Forward : Direction::Reverse, *pos};
  }

  void printCurrent(std::ostream& out) {
    out << renderDirac(session().current()) << "\n";
  }

  std::shared_ptr<const Registry> reg_;
  NormalizeConfig config_;
  std::optional<Session> session_;
  std::vector<RewriteStep> moves_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-sorted term rewriting for Dirac-notation quantum mechanics"};
  app.require_subcommand(1);
  Options o;
  if (const char* env = std::getenv("QREWRITE_MAX_STEPS")) {
    try {
      o.maxSteps = std::stoul(env);
    } catch (const std::exception&) {
      std::cerr << "ignoring malformed QREWRITE_MAX_STEPS\n";
    }
  }
  app.add_option("--rules", o.rulesFile, "Extra user rules file");
  app.add_option("--enable", o.enable, "Enable an optional rule")
      ->type_name("RULE");
  app.add_option("--max-steps", o.maxSteps, "Normalization step budget")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", o.format, "Term output format")
      ->check(CLI::IsMember({"dirac", "canonical"}));

  std::string file;
  auto* check = app.add_subcommand("check", "Parse a term and print its sort");
  check->add_option("file", file, "Term file (default stdin)");

  std::string dump;
  auto* norm = app.add_subcommand("normalize", "Print the canonical form");
  norm->add_option("file", file, "Term file (default stdin)");
  norm->add_option("--dump-derivation", dump, "Write the derivation here");

  auto* rep = app.add_subcommand("replay", "Replay and verify a derivation");
  rep->add_option("file", file, "Derivation file")->required();

  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> mutate;
  bool all = false;
  std::string sound_format = "text";
  auto* sound = app.add_subcommand("soundness", "Numerically check every rule");
  sound->add_option("--trials", trials, "Trials per rule")->check(CLI::PositiveNumber);
  sound->add_option("--seed", seed, "Random seed");
  sound->add_option("--mutate", mutate, "Check a broken variant of this rule")
      ->type_name("RULE");
  sound->add_flag("--all", all, "Include support and optional rules");
  sound->add_option("--output", sound_format, "Report format")
      ->check(CLI::IsMember({"text", "json"}));

  auto* rules = app.add_subcommand("rules", "List the rule catalogue");
  auto* repl = app.add_subcommand("repl", "Interactive derivation loop");

  int port = 8080;
  long idle = 1800;
  std::string host = "127.0.0.1";
  std::string ui_dir;
  auto* serve = app.add_subcommand("serve", "Serve the session API");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--idle-timeout", idle, "Seconds before an idle session expires")
      ->check(CLI::PositiveNumber);
  serve->add_option("--ui-dir", ui_dir, "Static files served under /ui");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*check) return cmdCheck(o, file);
    if (*norm) return cmdNormalize(o, file, dump);
    if (*rep) return cmdReplay(o, file);
    if (*sound) return cmdSoundness(o, trials, seed, mutate, all, sound_format);
    if (*rules) return cmdRules(o);
    if (*repl) return Repl(buildRegistry(o), configOf(o)).run(std::cin, std::cout);
    if (*serve) {
      SessionServer server(buildRegistry(o), configOf(o),
                           {std::chrono::seconds(idle), ui_dir});
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return kFailed;
      }
      return kOk;
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const Error& e) {
    return report(e);
  }
  return kOk;
}
