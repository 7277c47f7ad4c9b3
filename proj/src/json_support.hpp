#pragma once

// Internal JSON plumbing shared between the config and experiment-spec
// parsers; not part of the public API.

#include <json.hpp>

#include "fdsec/channel.hpp"

namespace fdsec {

/// Builds a NetworkConfig from an already-parsed JSON object; throws
/// ConfigError on structural problems.
NetworkConfig network_config_from_json(const nlohmann::json& doc);

}  // namespace fdsec
