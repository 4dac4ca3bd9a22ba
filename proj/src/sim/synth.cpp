#include "rim/sim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rim/errors.hpp"
#include "rim/rng.hpp"

namespace rim::sim {

namespace {

constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;

// Instantaneous frequency of the interferer's chirp train at absolute time t,
// as seen at the victim after the one-way propagation delay.
double interferer_frequency(const Interferer& inter, double t) {
  const double delay = inter.range_m / kSpeedOfLight;
  const double local = t - delay - inter.start_offset_s;
  if (inter.kind == InterfererKind::kSawtooth) {
    const double period = inter.chirp_duration_s;
    double u = std::fmod(local, period);
    if (u < 0.0) u += period;
    return inter.carrier_hz + inter.slope() * u;
  }
  const double period = 2.0 * inter.chirp_duration_s;
  double u = std::fmod(local, period);
  if (u < 0.0) u += period;
  if (u < inter.chirp_duration_s) {
    return inter.carrier_hz + inter.slope() * u;
  }
  return inter.carrier_hz + inter.slope() * (period - u);
}

}  // namespace

double beat_phase(const VictimRadar& radar, const Target& target, int sample_index,
                  int chirp_index) {
  radar.validate();
  if (!(target.range_m > 0.0) || !std::isfinite(target.range_m) ||
      !std::isfinite(target.velocity_mps)) {
    throw std::invalid_argument("beat_phase: target range must be positive and finite");
  }
  if (sample_index < 0 || sample_index >= radar.samples_per_chirp()) {
    throw std::invalid_argument("beat_phase: sample index outside the chirp");
  }
  if (chirp_index < 0) {
    throw std::invalid_argument("beat_phase: chirp index must be non-negative");
  }
  const double two_r_over_c = 2.0 * target.range_m / kSpeedOfLight;
  const double two_v_over_c = 2.0 * target.velocity_mps / kSpeedOfLight;
  const double range_term = two_r_over_c * radar.carrier_hz;
  const double doppler_term =
      two_v_over_c * radar.carrier_hz * static_cast<double>(chirp_index) * radar.chirp_duration_s;
  const double ramp_hz = 2.0 * radar.slope() * target.range_m / kSpeedOfLight +
                         two_v_over_c * radar.carrier_hz;
  const double t_in_chirp = static_cast<double>(sample_index) * radar.sample_period_s();
  return kTwoPi * (range_term + doppler_term + ramp_hz * t_in_chirp);
}

std::vector<double> clean_beat_signal(const RadarScene& scene, int chirp_index) {
  scene.validate();
  const int n = scene.victim.samples_per_chirp();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (const Target& target : scene.targets) {
    if (target.beat_frequency_hz(scene.victim) >= scene.victim.lpf_cutoff_hz) {
      continue;  // tone rejected by the receiver low-pass
    }
    for (int i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] +=
          target.amplitude * std::cos(beat_phase(scene.victim, target, i, chirp_index));
    }
  }
  return out;
}

std::vector<double> difference_frequency(const VictimRadar& victim, const Interferer& interferer,
                                         int chirp_index) {
  const int n = victim.samples_per_chirp();
  const double ts = victim.sample_period_s();
  const double chirp_start = static_cast<double>(chirp_index) * victim.chirp_duration_s;
  std::vector<double> delta(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = chirp_start + static_cast<double>(i) * ts;
    const double victim_freq = victim.carrier_hz + victim.slope() * (t - chirp_start);
    delta[static_cast<std::size_t>(i)] = victim_freq - interferer_frequency(interferer, t);
  }
  return delta;
}

std::vector<double> interference_beat(const RadarScene& scene, int chirp_index) {
  scene.validate();
  const int n = scene.victim.samples_per_chirp();
  const double ts = scene.victim.sample_period_s();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (const Interferer& inter : scene.interferers) {
    const std::vector<double> delta = difference_frequency(scene.victim, inter, chirp_index);
    double phase = 0.0;
    for (int i = 0; i < n; ++i) {
      if (i > 0) {
        phase += kPi * (delta[static_cast<std::size_t>(i - 1)] +
                        delta[static_cast<std::size_t>(i)]) * ts;
      }
      if (std::abs(delta[static_cast<std::size_t>(i)]) < scene.victim.lpf_cutoff_hz) {
        out[static_cast<std::size_t>(i)] += inter.amplitude * std::cos(phase);
      }
    }
  }
  return out;
}

std::vector<char> interference_support_mask(const RadarScene& scene, int chirp_index) {
  const std::vector<double> beat = interference_beat(scene, chirp_index);
  std::vector<char> mask(static_cast<std::size_t>(kFrameLen), 0);
  const std::size_t n = std::min<std::size_t>(beat.size(), kFrameLen);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = beat[i] != 0.0 ? 1 : 0;
  }
  return mask;
}

void normalize_unit_energy(std::span<double> x) {
  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (!(energy > 0.0) || !std::isfinite(energy)) {
    throw NormalizeError("cannot normalize: frame energy is zero or non-finite");
  }
  const double inv = 1.0 / std::sqrt(energy);
  for (double& v : x) v *= inv;
}

std::vector<double> frame_signal(std::span<const double> x, int* valid_len) {
  std::vector<double> out(static_cast<std::size_t>(kFrameLen), 0.0);
  const int kept = static_cast<int>(std::min<std::size_t>(x.size(), kFrameLen));
  std::copy_n(x.begin(), kept, out.begin());
  if (valid_len != nullptr) *valid_len = kept;
  return out;
}

BeatFrame synthesize_frame(const RadarScene& scene, int chirp_index) {
  const std::vector<double> clean = clean_beat_signal(scene, chirp_index);
  const std::vector<double> interference = interference_beat(scene, chirp_index);

  BeatFrame frame;
  frame.chirp_index = chirp_index;
  frame.scene_seed = scene.rng_seed;
  frame.label = frame_signal(clean, &frame.valid_len);

  std::vector<double> corrupted = clean;
  for (std::size_t i = 0; i < corrupted.size(); ++i) {
    corrupted[i] += interference[i];
  }
  if (scene.noise_std > 0.0) {
    Rng noise(mix_seed(scene.rng_seed, kNoiseStream + static_cast<std::uint64_t>(chirp_index)));
    const std::size_t n = std::min<std::size_t>(corrupted.size(), kFrameLen);
    for (std::size_t i = 0; i < n; ++i) {
      corrupted[i] += noise.normal(0.0, scene.noise_std);
    }
  }
  frame.input = frame_signal(corrupted);

  normalize_unit_energy(frame.label);
  normalize_unit_energy(frame.input);
  return frame;
}

}  // namespace rim::sim
