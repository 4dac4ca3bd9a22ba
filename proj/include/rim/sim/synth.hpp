#pragma once

#include <span>
#include <vector>

#include "rim/sim/radar.hpp"

namespace rim::sim {

// Sampled phase of one target's beat tone: constant range term, per-chirp
// Doppler progression, and the per-sample ramp combining range and Doppler.
double beat_phase(const VictimRadar& radar, const Target& target, int sample_index,
                  int chirp_index);

// Superposition of all target beat tones over chirp `chirp_index`, at full
// chirp length. Targets whose beat frequency lies beyond the receiver low-pass
// cutoff contribute nothing.
std::vector<double> clean_beat_signal(const RadarScene& scene, int chirp_index);

// Mixer output of every interferer against the victim chirp, low-pass gated:
// a sample carries interference only while the instantaneous difference
// frequency sits inside the receiver band. Phase is the trapezoid-integrated
// difference frequency from the chirp start.
std::vector<double> interference_beat(const RadarScene& scene, int chirp_index);

// Instantaneous victim-minus-interferer frequency at each sample of the chirp.
std::vector<double> difference_frequency(const VictimRadar& victim, const Interferer& interferer,
                                         int chirp_index);

// True of every frame position that carries interference energy (after
// framing to kFrameLen). Used to score how well a method cleans the burst.
std::vector<char> interference_support_mask(const RadarScene& scene, int chirp_index);

// Scales x to unit energy in place. Throws NormalizeError when the energy is zero.
void normalize_unit_energy(std::span<double> x);

// Truncates to kFrameLen or zero-pads, returning the kept length.
std::vector<double> frame_signal(std::span<const double> x, int* valid_len = nullptr);

// Builds the (input, label) pair for one chirp: label is the clean beat
// signal; input adds gated interference plus Gaussian noise drawn from a
// stream derived from (scene seed, chirp index). Both are framed then
// normalized to unit energy.
BeatFrame synthesize_frame(const RadarScene& scene, int chirp_index);

}  // namespace rim::sim
