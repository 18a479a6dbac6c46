#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "qrw/rules.hpp"
#include "qrw/strategy.hpp"
#include "qrw/syntax.hpp"
#include "qrw/term.hpp"

namespace qrw {

/// An interactive derivation: the current term plus an undo stack that
/// replays from the initial term. Shared by the REPL and the server; not
/// thread-safe on its own.
class Session {
 public:
  Session(Term initial, std::shared_ptr<const Registry> registry,
          NormalizeConfig config = {});

  const Term& initial() const { return initial_; }
  const Term& current() const;
  const Registry& registry() const { return *registry_; }
  const NormalizeConfig& config() const { return config_; }

  /// Steps taken so far, oldest first.
  std::vector<RewriteStep> history() const;
  std::size_t stepCount() const { return undo_.size(); }

  /// Same order as rules::applicable.
  std::vector<RewriteStep> moves() const;

  /// Throws whatever applyRule throws; the session is unchanged then.
  void apply(const RewriteStep& step);
  /// False when there is nothing to undo.
  bool undo();
  /// Normalizes the current term; returns the number of steps added.
  /// Throws StepLimitExceeded and leaves the session unchanged.
  std::size_t normalize();

  DerivationDocument derivation() const;

 private:
  Term initial_;
  std::shared_ptr<const Registry> registry_;
  NormalizeConfig config_;
  // previous term and the step taken from it
  std::vector<std::pair<Term, RewriteStep>> undo_;
  Term current_;
};

}  // namespace qrw
