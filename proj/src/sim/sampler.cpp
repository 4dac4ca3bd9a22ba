#include "rim/sim/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rim/rng.hpp"

namespace rim::sim {

namespace {

void require_ordered(double lo, double hi, const char* name) {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo <= hi)) {
    throw std::invalid_argument(std::string("sampler bounds ") + name + ": min must not exceed max");
  }
}

}  // namespace

void SamplerConfig::validate() const {
  require_ordered(radar.carrier_min_hz, radar.carrier_max_hz, "carrier");
  require_ordered(radar.bandwidth_min_hz, radar.bandwidth_max_hz, "bandwidth");
  require_ordered(radar.chirp_min_s, radar.chirp_max_s, "chirp duration");
  require_ordered(scene.range_min_m, scene.range_max_m, "range");
  require_ordered(scene.velocity_min_mps, scene.velocity_max_mps, "velocity");
  require_ordered(scene.snr_min_db, scene.snr_max_db, "snr");
  if (radar.carrier_min_hz <= 0.0 || radar.bandwidth_min_hz <= 0.0 || radar.chirp_min_s <= 0.0) {
    throw std::invalid_argument("radar bounds must be positive");
  }
  if (radar.sample_rate_hz <= 0.0 || radar.lpf_cutoff_hz <= 0.0 ||
      radar.lpf_cutoff_hz > radar.sample_rate_hz / 2.0) {
    throw std::invalid_argument("sample rate / low-pass cutoff inconsistent");
  }
  if (scene.range_min_m <= 0.0) {
    throw std::invalid_argument("range_min_m must be positive");
  }
  if (scene.targets_min < 0 || scene.targets_min > scene.targets_max) {
    throw std::invalid_argument("target count bounds inverted");
  }
  if (scene.interferers_min < 0 || scene.interferers_min > scene.interferers_max) {
    throw std::invalid_argument("interferer count bounds inverted");
  }
}

RadarScene sample_scene(std::uint64_t seed, const SamplerConfig& config) {
  config.validate();
  Rng rng(mix_seed(seed, 0x7363656eULL));

  RadarScene scene;
  scene.rng_seed = seed;
  scene.victim.carrier_hz = rng.uniform(config.radar.carrier_min_hz, config.radar.carrier_max_hz);
  scene.victim.sweep_bandwidth_hz =
      rng.uniform(config.radar.bandwidth_min_hz, config.radar.bandwidth_max_hz);
  scene.victim.chirp_duration_s = rng.uniform(config.radar.chirp_min_s, config.radar.chirp_max_s);
  scene.victim.num_chirps = kNumChirps;
  scene.victim.sample_rate_hz = config.radar.sample_rate_hz;
  scene.victim.lpf_cutoff_hz = config.radar.lpf_cutoff_hz;

  const int target_count =
      static_cast<int>(rng.uniform_int(config.scene.targets_min, config.scene.targets_max));
  const double slope = scene.victim.slope();
  // Largest range whose beat tone still clears the low-pass filter.
  const double range_ceiling = scene.victim.lpf_cutoff_hz * kSpeedOfLight / (2.0 * slope);
  for (int i = 0; i < target_count; ++i) {
    Target t;
    t.range_m = rng.uniform(config.scene.range_min_m, config.scene.range_max_m);
    int retries = 0;
    while (t.range_m >= range_ceiling && retries++ < 64) {
      t.range_m = rng.uniform(config.scene.range_min_m, std::min(config.scene.range_max_m,
                                                                 range_ceiling));
    }
    if (t.range_m >= range_ceiling) {
      throw std::invalid_argument("sample_scene: no admissible target range below the LPF cutoff");
    }
    t.velocity_mps = rng.uniform(config.scene.velocity_min_mps, config.scene.velocity_max_mps);
    t.amplitude = 1.0 / (t.range_m * t.range_m);
    scene.targets.push_back(t);
  }

  double strongest = 0.0;
  for (const Target& t : scene.targets) strongest = std::max(strongest, t.amplitude);

  const int interferer_count = static_cast<int>(
      rng.uniform_int(config.scene.interferers_min, config.scene.interferers_max));
  for (int i = 0; i < interferer_count; ++i) {
    Interferer inter;
    inter.carrier_hz = rng.uniform(config.radar.carrier_min_hz, config.radar.carrier_max_hz);
    inter.sweep_bandwidth_hz =
        rng.uniform(config.radar.bandwidth_min_hz, config.radar.bandwidth_max_hz);
    inter.chirp_duration_s = rng.uniform(config.radar.chirp_min_s, config.radar.chirp_max_s);
    // A sawtooth with exactly the victim slope would never produce a crossing;
    // redraw the duration in that (measure-zero) case.
    while (std::abs(inter.slope() - slope) < 1e-6 * slope) {
      inter.chirp_duration_s = rng.uniform(config.radar.chirp_min_s, config.radar.chirp_max_s);
    }
    inter.kind = rng.bernoulli(0.5) ? InterfererKind::kSawtooth : InterfererKind::kTriangle;
    inter.range_m = rng.uniform(config.scene.range_min_m, config.scene.range_max_m);
    inter.amplitude = strongest > 0.0 ? rng.log_uniform(0.5, 5.0) * strongest : 1.0;
    inter.start_offset_s = rng.uniform(0.0, inter.chirp_duration_s);
    scene.interferers.push_back(inter);
  }

  const double snr_db = rng.uniform(config.scene.snr_min_db, config.scene.snr_max_db);
  if (strongest > 0.0) {
    // Cosine of amplitude A against white noise sigma: SNR = A^2 / (2 sigma^2).
    scene.noise_std = strongest / std::sqrt(2.0 * std::pow(10.0, snr_db / 10.0));
  }

  scene.validate();
  return scene;
}

}  // namespace rim::sim
