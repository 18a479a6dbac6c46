#include "qrw/json.hpp"

namespace qrw {

namespace {

Json spanToJson(SourceSpan s) { return {{"start", s.start}, {"end", s.end}}; }

}  // namespace

Json errorToJson(const Error& e) {
  Json j{{"kind", e.kind()}, {"message", e.what()}};
  if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
    j["span"] = spanToJson(p->span());
    j["expected"] = p->expected();
    if (p->line() != 0) j["line"] = p->line();
  } else if (const auto* s = dynamic_cast<const SortError*>(&e)) {
    j["position"] = s->position();
    j["reason"] = s->reason();
    if (s->hasSpan()) j["span"] = spanToJson(s->span());
  } else if (const auto* r = dynamic_cast<const ReplayError*>(&e)) {
    j["stepIndex"] = r->stepIndex();
    j["cause"] = r->cause();
  } else if (const auto* l = dynamic_cast<const StepLimitExceeded*>(&e)) {
    j["maxSteps"] = l->maxSteps();
  }
  return j;
}

Json stepToJson(const RewriteStep& step) {
  return {{"ruleId", step.ruleId},
          {"direction", directionName(step.direction)},
          {"position", step.position.toString()}};
}

RewriteStep stepFromJson(const Json& j) {
  RewriteStep step;
  step.ruleId = j.at("ruleId").get<std::string>();
  const std::string dir = j.value("direction", "fwd");
  if (dir == "fwd") {
    step.direction = Direction::Forward;
  } else if (dir == "rev") {
    step.direction = Direction::Reverse;
  } else {
    throw ParseError({0, dir.size()}, "fwd or rev");
  }
  const std::string pos = j.value("position", "eps");
  auto parsed = Position::parse(pos);
  if (!parsed) throw ParseError({0, pos.size()}, "a position such as eps or 2.1");
  step.position = *parsed;
  return step;
}

Json diracToJson(const Term& t) {
  const DiracRendering r = renderDiracWithSpans(t);
  Json spans = Json::array();
  for (const DiracSpan& s : r.spans) {
    spans.push_back({{"position", s.position.toString()},
                     {"start", s.start},
                     {"end", s.end}});
  }
  return {{"text", r.text}, {"spans", spans}};
}

Json termStateToJson(const Term& t) {
  Json dirac = diracToJson(t);
  return {{"sort", t.sort().toString()},
          {"dirac", dirac["text"]},
          {"diracSpans", dirac["spans"]},
          {"canonical", renderCanonical(t)}};
}

Json derivationToJson(const DerivationDocument& doc) {
  Json steps = Json::array();
  for (const RewriteStep& s : doc.steps) steps.push_back(stepToJson(s));
  Json j{{"formatVersion", doc.formatVersion},
         {"initial", doc.initial},
         {"steps", steps},
         {"document", renderDerivation(doc)}};
  if (doc.expect) j["final"] = *doc.expect;
  return j;
}

Json soundnessToJson(const std::vector<SoundnessReport>& reports) {
  Json rules = Json::array();
  bool all_ok = true;
  for (const SoundnessReport& r : reports) {
    Json j{{"ruleId", r.ruleId},
           {"trials", r.trials},
           {"passed", r.passed},
           {"skipped", r.skipped},
           {"ok", r.ok()}};
    if (r.counterexample) {
      j["counterexample"] = {{"trial", r.counterexample->trial},
                             {"lhs", r.counterexample->lhs},
                             {"rhs", r.counterexample->rhs},
                             {"difference", r.counterexample->difference}};
    }
    all_ok = all_ok && r.ok();
    rules.push_back(std::move(j));
  }
  return {{"ok", all_ok}, {"rules", rules}};
}

}  // namespace qrw
