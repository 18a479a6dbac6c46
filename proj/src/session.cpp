#include "qrw/session.hpp"

namespace qrw {

Session::Session(Term initial, std::shared_ptr<const Registry> registry,
                 NormalizeConfig config)
    : initial_(initial),
      registry_(std::move(registry)),
      config_(std::move(config)),
      current_(std::move(initial)) {
  sortOf(initial_);
}

const Term& Session::current() const { return current_; }

std::vector<RewriteStep> Session::history() const {
  std::vector<RewriteStep> out;
  out.reserve(undo_.size());
  for (const auto& entry : undo_) out.push_back(entry.second);
  return out;
}

std::vector<RewriteStep> Session::moves() const {
  return applicable(current_, *registry_);
}

void Session::apply(const RewriteStep& step) {
  Term next = applyRule(current_, step, *registry_);
  undo_.emplace_back(current_, step);
  current_ = std::move(next);
}

bool Session::undo() {
  if (undo_.empty()) return false;
  current_ = undo_.back().first;
  undo_.pop_back();
  return true;
}

std::size_t Session::normalize() {
  NormalizeConfig config = config_;
  config.optionalRules.clear();  // already folded into the registry
  const NormalizeResult result = qrw::normalize(current_, *registry_, config);
  Term t = current_;
  for (const RewriteStep& step : result.derivation.steps) {
    Term next = applyRule(t, step, *registry_);
    undo_.emplace_back(t, step);
    t = std::move(next);
  }
  current_ = result.term;
  return result.derivation.steps.size();
}

DerivationDocument Session::derivation() const {
  DerivationDocument doc;
  doc.initial = renderCanonical(initial_);
  doc.steps = history();
  doc.expect = renderCanonical(current_);
  return doc;
}

}  // namespace qrw
