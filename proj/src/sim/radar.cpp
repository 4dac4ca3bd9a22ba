#include "rim/sim/radar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rim::sim {

namespace {

void require_finite_positive(double v, const char* name) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw std::invalid_argument(std::string(name) + " must be finite and positive");
  }
}

}  // namespace

void VictimRadar::validate() const {
  require_finite_positive(carrier_hz, "carrier_hz");
  require_finite_positive(sweep_bandwidth_hz, "sweep_bandwidth_hz");
  require_finite_positive(chirp_duration_s, "chirp_duration_s");
  require_finite_positive(sample_rate_hz, "sample_rate_hz");
  require_finite_positive(lpf_cutoff_hz, "lpf_cutoff_hz");
  if (num_chirps < 1) {
    throw std::invalid_argument("num_chirps must be at least 1");
  }
  if (!(std::isfinite(slope()) && slope() > 0.0)) {
    throw std::invalid_argument("chirp slope must be finite and positive");
  }
  if (lpf_cutoff_hz > sample_rate_hz / 2.0) {
    throw std::invalid_argument("lpf_cutoff_hz must not exceed the Nyquist frequency");
  }
}

void RadarScene::validate() const {
  victim.validate();
  for (const Target& t : targets) {
    require_finite_positive(t.range_m, "target range_m");
    require_finite_positive(t.amplitude, "target amplitude");
    if (!std::isfinite(t.velocity_mps)) {
      throw std::invalid_argument("target velocity_mps must be finite");
    }
  }
  for (const Interferer& i : interferers) {
    require_finite_positive(i.carrier_hz, "interferer carrier_hz");
    require_finite_positive(i.sweep_bandwidth_hz, "interferer sweep_bandwidth_hz");
    require_finite_positive(i.chirp_duration_s, "interferer chirp_duration_s");
    require_finite_positive(i.range_m, "interferer range_m");
    require_finite_positive(i.amplitude, "interferer amplitude");
    if (!std::isfinite(i.start_offset_s)) {
      throw std::invalid_argument("interferer start_offset_s must be finite");
    }
  }
  if (!(std::isfinite(noise_std) && noise_std >= 0.0)) {
    throw std::invalid_argument("noise_std must be finite and non-negative");
  }
}

}  // namespace rim::sim
