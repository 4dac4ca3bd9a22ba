#pragma once

#include <cstdint>

#include "rim/sim/radar.hpp"

namespace rim::sim {

// Draw ranges for the victim radar parameters. Sample rate and low-pass
// cutoff are fixed per configuration, not drawn.
struct RadarBounds {
  double carrier_min_hz = 76.0e9;
  double carrier_max_hz = 78.0e9;
  double bandwidth_min_hz = 100.0e6;
  double bandwidth_max_hz = 200.0e6;
  double chirp_min_s = 20.0e-6;
  double chirp_max_s = 40.0e-6;
  double sample_rate_hz = 20.0e6;
  double lpf_cutoff_hz = 10.0e6;
};

struct SceneBounds {
  double range_min_m = 1.0;
  double range_max_m = 130.0;
  double velocity_min_mps = 0.0;
  double velocity_max_mps = 50.0 / 3.6;
  int targets_min = 1;
  int targets_max = 2;
  int interferers_min = 1;
  int interferers_max = 4;
  double snr_min_db = 10.0;
  double snr_max_db = 30.0;
};

struct SamplerConfig {
  RadarBounds radar;
  SceneBounds scene;

  // Throws std::invalid_argument when any bound is inverted or out of range.
  void validate() const;
};

// Draws a fully specified random scenario, deterministic in the seed.
// Target amplitudes scale as 1/R^2; interferer amplitudes are log-uniform in
// [0.5, 5] times the strongest target; noise sigma realizes a uniform
// strongest-target SNR in [snr_min_db, snr_max_db].
RadarScene sample_scene(std::uint64_t seed, const SamplerConfig& config = {});

}  // namespace rim::sim
