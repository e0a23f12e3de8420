#pragma once

#include <json.hpp>

#include "sai/driver.hpp"
#include "sai/splitting.hpp"

namespace sai {

inline constexpr int kSchemaVersion = 1;

/// Stable JSON form of a solve report. Wall-clock fields live under "timing".
nlohmann::json to_json(const SolveReport& rep, bool include_solution = false);

nlohmann::json to_json(const PreconditionerStats& stats);

/// Sidecar describing a split: s, irregular columns, strategy, p_kept, factor.
nlohmann::json split_sidecar(const SplitSystem& sys);

}  // namespace sai
