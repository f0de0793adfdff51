#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "mpst/config.hpp"
#include "mpst/equivalence.hpp"
#include "mpst/semantics.hpp"
#include "mpst/wellformed.hpp"

namespace mpst::bridge {

using nlohmann::json;

/// Stateless request dispatcher. Requests carry `op` plus op-specific fields;
/// responses are `{ok, payload}` or `{ok: false, error: {kind, message, ...}}`.
json handle(const json& request);

/// Parses `body` as a request and serialises the response. A malformed body
/// yields an error response of kind "MalformedRequest".
std::string handleText(std::string_view body);

/// True for responses produced from a malformed or incomplete request.
bool isRequestError(const json& response);

// Conversions shared with the CLI.
json toJson(const SemanticsConfig& c);
/// Accepts `{"preset": name, ...field overrides}`; unknown fields are errors.
SemanticsConfig configFromJson(const json& j);

json toJson(const CheckReport& r);
json toJson(const Local& l);
Local localFromJson(const json& j);
json toJson(const Configuration& cfg);
Configuration configurationFromJson(const json& j);
json toJson(const BisimVerdict& v);
json ltsSummary(const Lts& lts);

}  // namespace mpst::bridge
