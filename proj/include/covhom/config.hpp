#pragma once

#include "covhom/homogenize.hpp"

#include <optional>
#include <string>

namespace covhom {

struct OutputConfig {
    std::string dir = "out";
    bool json = true;
    bool csv = true;
};

struct MatpConfig {
    bool enabled = false;
    MatpOptions options;
};

/// Parsed scenario file. Every failure is a ConfigError naming the offending field.
struct ScenarioConfig {
    Scenario scenario;
    GridSpec table_grid{2.0, 33};  ///< grid of the alpha and beta output tables
    MatpConfig matp;
    OutputConfig output;
};

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Applies a seed to every seeded component of the scenario.
void apply_seed(ScenarioConfig& config, std::uint64_t seed);

}  // namespace covhom
