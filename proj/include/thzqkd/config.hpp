#pragma once

// Scenario configuration files (YAML). See README.md for the schema.

#include <filesystem>
#include <string>
#include <string_view>

#include "thzqkd/experiments.hpp"
#include "thzqkd/keyrate.hpp"

namespace thzqkd {

struct ScenarioConfig {
  Scenario scenario;
  RateMethod method = RateMethod::large_modulation;
};

// Throws ConfigError. Relative absorption-table paths resolve against
// base_dir.
ScenarioConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical, fully-expanded YAML rendering of a scenario; parse_config
// accepts it back.
std::string canonical_text(const Scenario& scenario);
// FNV-1a 64 of canonical_text, as 16 hex digits.
std::string scenario_hash(const Scenario& scenario);

}  // namespace thzqkd
