#pragma once

#include <cstdint>

namespace rim {

// Propagation speed used by every range/Doppler mapping in the pipeline.
inline constexpr double kSpeedOfLight = 3.0e8;  // m/s

// Fixed beat-frame length: longer chirps are truncated, shorter ones zero-padded.
inline constexpr int kFrameLen = 416;

// Chirps per coherent processing frame (range-Doppler analysis).
inline constexpr int kNumChirps = 75;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Power floor applied before converting spectra to dB.
inline constexpr double kDbFloor = -300.0;

}  // namespace rim
