#pragma once

#include <span>
#include <vector>

#include "rim/sim/radar.hpp"
#include "rim/spectral/fft.hpp"

namespace rim::spectral {

enum class WindowKind { kRectangular, kHann };

// One-sided power spectrum of a beat frame, with the bin-to-range mapping
// implied by the victim chirp slope.
struct RangeSpectrum {
  std::vector<double> power_db;  // kFrameLen / 2 bins, floored at kDbFloor
  double bin_width_hz = 0.0;
  double range_per_bin_m = 0.0;

  double range_of_bin(int bin) const { return range_per_bin_m * static_cast<double>(bin); }
};

std::vector<double> make_window(WindowKind kind, int length);

// Windowed one-sided complex spectrum; building block shared by the range and
// Doppler transforms.
std::vector<Complex> complex_range_spectrum(std::span<const double> frame, WindowKind window);

// Rejects non-finite samples and frames that are not kFrameLen long.
RangeSpectrum range_fft(std::span<const double> frame, WindowKind window, double sample_rate_hz,
                        double slope_hz_per_s);

// Power map over (range bin, Doppler bin) from one num_chirps x kFrameLen
// frame. Doppler bin d corresponds to d / num_chirps cycles per chirp.
struct RangeDopplerMap {
  int num_range_bins = 0;
  int num_doppler_bins = 0;
  std::vector<double> power_db;  // row-major: range bin r, then Doppler bin d
  double range_per_bin_m = 0.0;

  double at(int range_bin, int doppler_bin) const {
    return power_db[static_cast<std::size_t>(range_bin) *
                        static_cast<std::size_t>(num_doppler_bins) +
                    static_cast<std::size_t>(doppler_bin)];
  }
};

RangeDopplerMap doppler_fft(const std::vector<std::vector<double>>& chirps,
                            const sim::VictimRadar& victim);

// Velocity implied by a per-chirp phase progression of `cycles_per_chirp`.
double velocity_from_doppler_cycles(double cycles_per_chirp, const sim::VictimRadar& victim);

struct Peak {
  int bin = 0;
  double range_m = 0.0;
  double power_db = 0.0;
};

// Local maxima that clear median + 12 dB and dominate their +/-3-bin
// neighborhood, strongest first, at most max_peaks entries.
std::vector<Peak> detect_peaks(const RangeSpectrum& spectrum, int max_peaks);

// Signal to remaining interference-plus-noise ratio: mean power in the
// +/-1-bin cells around each true target over mean power outside the
// +/-4-bin target+guard region. Targets mapping outside the spectrum are
// skipped; throws std::invalid_argument when none remain.
double srinr_db(const RangeSpectrum& spectrum, std::span<const sim::Target> targets,
                const sim::VictimRadar& victim);

}  // namespace rim::spectral
