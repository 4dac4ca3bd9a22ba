#include <doctest.h>

#include <cmath>

#include "rim/baselines/mitigation.hpp"
#include "rim/common.hpp"
#include "rim/rng.hpp"
#include "rim/sim/sampler.hpp"
#include "rim/sim/synth.hpp"
#include "rim/spectral/spectrum.hpp"

using namespace rim;
using namespace rim::baseline;

namespace {

std::vector<double> unit_cosine(double cycles_per_sample, double phase = 0.0) {
  std::vector<double> frame(static_cast<std::size_t>(kFrameLen));
  for (int n = 0; n < kFrameLen; ++n) {
    frame[static_cast<std::size_t>(n)] = std::cos(kTwoPi * cycles_per_sample * n + phase);
  }
  sim::normalize_unit_energy(frame);
  return frame;
}

double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

double rms(const std::vector<double>& x, int begin, int end) {
  double acc = 0.0;
  for (int i = begin; i < end; ++i) acc += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  return std::sqrt(acc / static_cast<double>(end - begin));
}

}  // namespace

TEST_CASE("thresholding leaves an interference-free sinusoid untouched") {
  // MAD scale of a sinusoid is A/sqrt(2); 3x that clears the peak amplitude.
  const auto frame = unit_cosine(0.08);
  const auto out = tdt_mitigate(frame, {});
  REQUIRE(out.size() == frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    CHECK(out[i] == doctest::Approx(frame[i]).epsilon(1e-12));
  }
}

TEST_CASE("thresholding zeroes a lone huge spike") {
  auto frame = unit_cosine(0.07);
  frame[100] = 1.0;  // far above the robust scale of a unit-energy sinusoid
  const auto out = tdt_mitigate(frame, {});
  CHECK(out[100] == 0.0);
  CHECK(energy(out) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolating replacement bridges a clipped run linearly") {
  MitigationConfig config;
  config.tdt_replace = TdtReplace::kInterpolate;
  auto frame = unit_cosine(0.05);
  frame[200] = 2.0;
  frame[201] = 2.0;
  const auto out = tdt_mitigate(frame, config);
  // Untouched neighbors are frame[199] and frame[202] after rescaling by a
  // common factor; the bridged samples must sit on the straight line.
  const double left = out[199], right = out[202];
  CHECK(out[200] == doctest::Approx(left + (right - left) / 3.0).epsilon(1e-9));
  CHECK(out[201] == doctest::Approx(left + 2.0 * (right - left) / 3.0).epsilon(1e-9));
}

TEST_CASE("a constant frame passes thresholding unchanged") {
  std::vector<double> frame(static_cast<std::size_t>(kFrameLen), 0.25);
  const auto out = tdt_mitigate(frame, {});
  for (double v : out) CHECK(v == 0.25);
}

TEST_CASE("envelope suppression is a no-op on a constant-envelope sinusoid") {
  // Frequency 94/832 cycles/sample with phase pi*f: the 31-sample sliding RMS
  // is flat to a few 1e-4 and the edges continue symmetrically.
  const double f = 94.0 / 832.0;
  const auto frame = unit_cosine(f, kPi * f);
  const auto out = envelope_mitigate(frame, {});
  for (std::size_t i = 0; i < frame.size(); ++i) {
    CHECK(std::abs(out[i] - frame[i]) <= 1e-3);
  }
}

TEST_CASE("envelope suppression flattens a strong burst") {
  auto frame = unit_cosine(0.11);
  for (int i = 150; i < 230; ++i) frame[static_cast<std::size_t>(i)] *= 10.0;
  const double in_ratio = rms(frame, 165, 215) / rms(frame, 280, 400);
  CHECK(in_ratio == doctest::Approx(10.0).epsilon(0.05));

  const auto out = envelope_mitigate(frame, {});
  const double out_ratio = rms(out, 165, 215) / rms(out, 280, 400);
  // The burst interior is pulled down to the crest allowance of the divisor
  // floor, a relative attenuation of roughly 10/1.5.
  CHECK(out_ratio < 1.7);
  CHECK(in_ratio / out_ratio > 5.0);
}

TEST_CASE("envelope suppression maps the zero frame to itself") {
  const std::vector<double> frame(static_cast<std::size_t>(kFrameLen), 0.0);
  const auto out = envelope_mitigate(frame, {});
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("passthrough is the identity and idempotent") {
  const auto frame = unit_cosine(0.09);
  const auto once = passthrough(frame);
  const auto twice = passthrough(once);
  CHECK(once == frame);
  CHECK(twice == frame);
  CHECK(energy(once) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("both methods preserve unit energy on random interfered frames") {
  sim::SamplerConfig config;
  for (std::uint64_t seed = 700; seed < 720; ++seed) {
    const sim::RadarScene scene = sim::sample_scene(seed, config);
    const sim::BeatFrame frame = sim::synthesize_frame(scene, 3);
    CHECK(std::abs(energy(tdt_mitigate(frame.input, {})) - 1.0) < 1e-9);
    CHECK(std::abs(energy(envelope_mitigate(frame.input, {})) - 1.0) < 1e-9);
  }
}

TEST_CASE("both methods are scale-equivariant up to the final rescale") {
  sim::SamplerConfig config;
  const sim::RadarScene scene = sim::sample_scene(801, config);
  const sim::BeatFrame frame = sim::synthesize_frame(scene, 10);
  std::vector<double> scaled = frame.input;
  for (double& v : scaled) v *= 13.5;

  const auto tdt_a = tdt_mitigate(frame.input, {});
  const auto tdt_b = tdt_mitigate(scaled, {});
  const auto env_a = envelope_mitigate(frame.input, {});
  const auto env_b = envelope_mitigate(scaled, {});
  for (std::size_t i = 0; i < tdt_a.size(); ++i) {
    CHECK(std::abs(tdt_a[i] - tdt_b[i]) < 1e-9);
    CHECK(std::abs(env_a[i] - env_b[i]) < 1e-9);
  }
}

TEST_CASE("mitigation keeps the SRINR of interference-free frames within 1 dB") {
  sim::SamplerConfig config;
  config.scene.interferers_min = 0;
  config.scene.interferers_max = 0;
  for (std::uint64_t seed = 900; seed < 920; ++seed) {
    const sim::RadarScene scene = sim::sample_scene(seed, config);
    const sim::BeatFrame frame = sim::synthesize_frame(scene, 5);
    const auto base_spec = spectral::range_fft(frame.input, spectral::WindowKind::kHann,
                                               scene.victim.sample_rate_hz, scene.victim.slope());
    const double base = spectral::srinr_db(base_spec, scene.targets, scene.victim);
    for (const auto& mitigated :
         {tdt_mitigate(frame.input, {}), envelope_mitigate(frame.input, {})}) {
      const auto spec = spectral::range_fft(mitigated, spectral::WindowKind::kHann,
                                            scene.victim.sample_rate_hz, scene.victim.slope());
      CHECK(spectral::srinr_db(spec, scene.targets, scene.victim) >= base - 1.0);
    }
  }
}

TEST_CASE("mitigation config validation") {
  MitigationConfig bad_beta;
  bad_beta.tdt_beta = 0.0;
  CHECK_THROWS_AS(bad_beta.validate(), std::invalid_argument);
  MitigationConfig bad_window;
  bad_window.envelope_window = 10;
  CHECK_THROWS_AS(bad_window.validate(), std::invalid_argument);
  bad_window.envelope_window = 1;
  CHECK_THROWS_AS(bad_window.validate(), std::invalid_argument);
  CHECK(tdt_replace_from_string("zero") == TdtReplace::kZero);
  CHECK(tdt_replace_from_string("linear-interpolate") == TdtReplace::kInterpolate);
  CHECK_THROWS(tdt_replace_from_string("blank"));
}
