#pragma once

#include <json.hpp>

#include "qrw/errors.hpp"
#include "qrw/interp.hpp"
#include "qrw/session.hpp"
#include "qrw/syntax.hpp"

namespace qrw {

using Json = nlohmann::json;

/// {"kind": "...", "message": "...", ...type-specific fields}
Json errorToJson(const Error& e);

Json stepToJson(const RewriteStep& step);
/// Throws ParseError on a bad direction or position; the rule id is taken
/// verbatim and resolved on application.
RewriteStep stepFromJson(const Json& j);

/// {"text", "spans": [{"position", "start", "end"}]}
Json diracToJson(const Term& t);

/// The session-state body shared by the session endpoints.
Json termStateToJson(const Term& t);

Json derivationToJson(const DerivationDocument& doc);

Json soundnessToJson(const std::vector<SoundnessReport>& reports);

}  // namespace qrw
