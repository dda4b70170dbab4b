// config.hpp
// JSON configuration files. Unknown keys are rejected; missing keys take the
// library defaults. Physical quantities carry their unit in the key name.

#pragma once

#include "json.hpp"
#include <stdexcept>
#include <string>

#include "hsteer/circuit.hpp"
#include "hsteer/spacetime.hpp"

namespace hsteer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json_file(const std::string& path);

/// Parses and validates; every failure surfaces as ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

SpacetimeGeometry parse_geometry(const nlohmann::json& j);
SpacetimeGeometry load_geometry(const std::string& path);
nlohmann::json to_json(const SpacetimeGeometry& geometry);

std::string to_string(PairState state);
PairState parse_pair_state(const std::string& name);

}  // namespace hsteer
