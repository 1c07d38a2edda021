#pragma once

#include <string>

#include <json.hpp>

#include "slicecount/engine.hpp"
#include "slicecount/harness.hpp"

namespace slicecount {

/// Bumped whenever a field is renamed or removed.
inline constexpr const char* kSchemaVersion = "slicecount-report/1";

nlohmann::ordered_json toJson(const Params& p);
nlohmann::ordered_json toJson(const InvariantCounts& inv);
nlohmann::ordered_json toJson(const CountResult& r, bool diagnostics);
nlohmann::ordered_json toJson(const TrialReport& r);

/// Human-readable rendering of the same fields.
std::string toText(const nlohmann::ordered_json& j, int indent = 0);

}  // namespace slicecount
