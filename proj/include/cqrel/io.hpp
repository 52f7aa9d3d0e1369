#pragma once

#include <string>

#include <json.hpp>

#include "cqrel/channel.hpp"

namespace cqrel {

/// Channel file schema:
///   {"dim": d, "states": [[[ [re, im], ... ] ...], ...], "name": optional}
/// with row-major nested arrays, or a parametric family
///   {"family": "bsc", "params": {"p": 0.1}}
/// (families: bsc(p), pure2(eps), classical(P)).
CqChannel channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const CqChannel& ch);

/// Loads a channel from a JSON file; wraps parse failures as io errors.
CqChannel load_channel(const std::string& path);

/// Resolves a channel source: an inline family spec such as "bsc(0.1)" or
/// "pure2(0.5)", else a file path.
CqChannel resolve_channel_source(const std::string& source);

/// Formats a double with 12 significant digits; non-finite values print as
/// "inf"/"-inf"/"nan".
std::string format_sig12(double v);

/// JSON value for a scalar: finite numbers stay numbers, infinities become
/// the string "inf"/"-inf".
nlohmann::json json_number(double v);

}  // namespace cqrel
