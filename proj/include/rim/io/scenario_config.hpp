#pragma once

#include <string>

#include "rim/baselines/mitigation.hpp"
#include "rim/sim/sampler.hpp"

namespace rim::io {

// Plain-text configuration: [radar] drawing bounds plus sampling/filter
// settings, [scene] target/interferer bounds, [baselines] mitigation knobs.
// Velocities are written in km/h; everything else is SI.
struct ScenarioConfig {
  sim::SamplerConfig sampler;
  baseline::MitigationConfig mitigation;
};

ScenarioConfig parse_scenario_config_text(const std::string& text);
ScenarioConfig load_scenario_config(const std::string& path);

}  // namespace rim::io
