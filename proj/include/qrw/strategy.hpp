#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "qrw/rules.hpp"
#include "qrw/syntax.hpp"
#include "qrw/term.hpp"

namespace qrw {

struct Derivation {
  Term initial;
  std::vector<RewriteStep> steps;
  Term final;
};

struct NormalizeConfig {
  std::size_t maxSteps = 10000;
  bool applyUserRules = true;
  /// Optional rule ids to enable (and use forward) during normalization.
  std::set<std::string> optionalRules;
};

struct NormalizeResult {
  Term term;
  Derivation derivation;
};

/// The registry a normalization with `config` actually runs against; replay
/// its derivations with this registry.
Registry effectiveRegistry(const Registry& registry,
                           const NormalizeConfig& config);

/// Rewrites to the canonical form: a sum of scalar-weighted tensor
/// monomials, tensor factors ordered by space, summands ordered by
/// canonical text, like summands merged, zero summands dropped. Every
/// change is a recorded rule application. Throws StepLimitExceeded.
NormalizeResult normalize(const Term& t, const Registry& registry,
                          const NormalizeConfig& config = {});

/// Applies the steps in order. Throws ReplayError naming the first step
/// that does not apply.
Term replay(const Term& initial, const std::vector<RewriteStep>& steps,
            const Registry& registry);

/// Sound (never wrongly true) but incomplete: compares normal forms.
/// Throws SortError when the sorts differ.
bool equivalent(const Term& a, const Term& b, const Registry& registry,
                const NormalizeConfig& config = {});

}  // namespace qrw
