#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "altbd/model.hpp"

namespace altbd {

// Config document layout:
//   {
//     "topology": {"kind": "one-sided" | "two-sided" | "finite", "n": N},
//     "allow_zeros": false,
//     "rates": {"lambda": 1, "mu": {"a": 1, "b": 0.5}, "delta": "1/(1+n)",
//               "beta": {"table": {"0": 2, "1": 3}, "tail": 1}, ...}
//   }
// Missing rates are a config error. Table keys are decimal level strings.

RateSpec rate_spec_from_json(const nlohmann::json& j);
nlohmann::json rate_spec_to_json(const RateSpec& spec);

Topology topology_from_json(const nlohmann::json& j);
nlohmann::json topology_to_json(const Topology& t);

/// Throws Error(kConfig) on schema violations and ParseError for malformed
/// rate expressions.
RateSet rate_set_from_json(const nlohmann::json& j);
nlohmann::json rate_set_to_json(const RateSet& rates);

RateSet load_model(const std::filesystem::path& path);
RateSet parse_model(const std::string& text);

}  // namespace altbd
