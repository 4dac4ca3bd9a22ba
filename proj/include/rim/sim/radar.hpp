#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "rim/common.hpp"

namespace rim::sim {

// Parameters of the radar whose receiver we simulate. One frame is
// num_chirps identical linear up-chirps of duration chirp_duration_s.
struct VictimRadar {
  double carrier_hz = 77.0e9;
  double sweep_bandwidth_hz = 150.0e6;
  double chirp_duration_s = 30.0e-6;
  int num_chirps = kNumChirps;
  double sample_rate_hz = 20.0e6;
  double lpf_cutoff_hz = 10.0e6;

  double slope() const { return sweep_bandwidth_hz / chirp_duration_s; }
  double sample_period_s() const { return 1.0 / sample_rate_hz; }
  int samples_per_chirp() const {
    return static_cast<int>(std::llround(chirp_duration_s * sample_rate_hz));
  }

  // Throws std::invalid_argument on non-finite or inconsistent parameters.
  void validate() const;
};

struct Target {
  double range_m = 0.0;
  double velocity_mps = 0.0;
  double amplitude = 1.0;  // linear

  // Range-proportional beat frequency of this target's echo.
  double beat_frequency_hz(const VictimRadar& radar) const {
    return 2.0 * radar.slope() * range_m / kSpeedOfLight;
  }
};

enum class InterfererKind { kSawtooth, kTriangle };

// An uncoordinated FMCW emitter received on a direct (one-way) path.
struct Interferer {
  double carrier_hz = 77.0e9;
  double sweep_bandwidth_hz = 150.0e6;
  double chirp_duration_s = 30.0e-6;  // one sweep segment; triangle period is twice this
  InterfererKind kind = InterfererKind::kSawtooth;
  double range_m = 50.0;
  double amplitude = 1.0;
  double start_offset_s = 0.0;  // phase of the interferer's chirp train at t = 0

  double slope() const { return sweep_bandwidth_hz / chirp_duration_s; }
};

struct RadarScene {
  VictimRadar victim;
  std::vector<Target> targets;        // 1..2 when sampled; empty allowed for diagnostics
  std::vector<Interferer> interferers;  // 0..4
  double noise_std = 0.0;             // per-sample Gaussian sigma, linear
  std::uint64_t rng_seed = 0;

  void validate() const;
};

// One chirp's sampled beat signal: the interfered receiver output paired with
// the clean (interference- and noise-free) reference, both unit-energy.
struct BeatFrame {
  std::vector<double> input;   // kFrameLen samples
  std::vector<double> label;   // kFrameLen samples
  int valid_len = 0;           // entries at indices >= valid_len are exactly zero
  int chirp_index = 0;
  std::uint64_t scene_seed = 0;
};

}  // namespace rim::sim
