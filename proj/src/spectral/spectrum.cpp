#include "rim/spectral/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rim/common.hpp"

namespace rim::spectral {

namespace {

double power_to_db(double power) {
  constexpr double floor_linear = 1.0e-30;  // == kDbFloor
  return 10.0 * std::log10(std::max(power, floor_linear));
}

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  return values[mid];
}

}  // namespace

std::vector<double> make_window(WindowKind kind, int length) {
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (kind == WindowKind::kHann && length > 1) {
    for (int i = 0; i < length; ++i) {
      w[static_cast<std::size_t>(i)] =
          0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(length - 1)));
    }
  }
  return w;
}

std::vector<Complex> complex_range_spectrum(std::span<const double> frame, WindowKind window) {
  const std::vector<double> w = make_window(window, static_cast<int>(frame.size()));
  std::vector<Complex> data(frame.size());
  for (std::size_t i = 0; i < frame.size(); ++i) {
    data[i] = Complex(frame[i] * w[i], 0.0);
  }
  fft_inplace(data, false);
  data.resize(frame.size() / 2);  // one-sided; real input
  return data;
}

RangeSpectrum range_fft(std::span<const double> frame, WindowKind window, double sample_rate_hz,
                        double slope_hz_per_s) {
  if (frame.size() != static_cast<std::size_t>(kFrameLen)) {
    throw std::invalid_argument("range_fft: frame must have kFrameLen samples");
  }
  for (double v : frame) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("range_fft: non-finite sample");
    }
  }
  if (!(sample_rate_hz > 0.0) || !(slope_hz_per_s > 0.0)) {
    throw std::invalid_argument("range_fft: sample rate and slope must be positive");
  }

  const std::vector<Complex> spec = complex_range_spectrum(frame, window);
  RangeSpectrum out;
  out.bin_width_hz = sample_rate_hz / static_cast<double>(kFrameLen);
  out.range_per_bin_m = kSpeedOfLight * out.bin_width_hz / (2.0 * slope_hz_per_s);
  out.power_db.resize(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) {
    out.power_db[i] = power_to_db(std::norm(spec[i]));
  }
  return out;
}

RangeDopplerMap doppler_fft(const std::vector<std::vector<double>>& chirps,
                            const sim::VictimRadar& victim) {
  if (chirps.size() != static_cast<std::size_t>(victim.num_chirps)) {
    throw std::invalid_argument("doppler_fft: chirp row count must equal num_chirps");
  }
  const int num_range = kFrameLen / 2;
  const int num_doppler = victim.num_chirps;

  // First FFT along fast time per chirp, then along the chirp axis.
  std::vector<std::vector<Complex>> range_rows;
  range_rows.reserve(chirps.size());
  for (const std::vector<double>& chirp : chirps) {
    if (chirp.size() != static_cast<std::size_t>(kFrameLen)) {
      throw std::invalid_argument("doppler_fft: every chirp row must have kFrameLen samples");
    }
    range_rows.push_back(complex_range_spectrum(chirp, WindowKind::kHann));
  }

  RangeDopplerMap map;
  map.num_range_bins = num_range;
  map.num_doppler_bins = num_doppler;
  map.range_per_bin_m =
      kSpeedOfLight * (victim.sample_rate_hz / static_cast<double>(kFrameLen)) /
      (2.0 * victim.slope());
  map.power_db.resize(static_cast<std::size_t>(num_range) * static_cast<std::size_t>(num_doppler));
  std::vector<Complex> column(static_cast<std::size_t>(num_doppler));
  for (int r = 0; r < num_range; ++r) {
    for (int d = 0; d < num_doppler; ++d) {
      column[static_cast<std::size_t>(d)] = range_rows[static_cast<std::size_t>(d)]
                                                      [static_cast<std::size_t>(r)];
    }
    fft_inplace(column, false);
    for (int d = 0; d < num_doppler; ++d) {
      map.power_db[static_cast<std::size_t>(r) * static_cast<std::size_t>(num_doppler) +
                   static_cast<std::size_t>(d)] =
          power_to_db(std::norm(column[static_cast<std::size_t>(d)]));
    }
  }
  return map;
}

double velocity_from_doppler_cycles(double cycles_per_chirp, const sim::VictimRadar& victim) {
  return cycles_per_chirp * kSpeedOfLight / (2.0 * victim.carrier_hz * victim.chirp_duration_s);
}

std::vector<Peak> detect_peaks(const RangeSpectrum& spectrum, int max_peaks) {
  if (max_peaks < 1) {
    throw std::invalid_argument("detect_peaks: max_peaks must be at least 1");
  }
  const std::vector<double>& bins = spectrum.power_db;
  const int n = static_cast<int>(bins.size());
  const double threshold = median_of(bins) + 12.0;

  std::vector<Peak> peaks;
  for (int i = 0; i < n; ++i) {
    const double v = bins[static_cast<std::size_t>(i)];
    if (v <= threshold) continue;
    bool dominant = true;
    for (int j = std::max(0, i - 3); j <= std::min(n - 1, i + 3) && dominant; ++j) {
      if (j != i && bins[static_cast<std::size_t>(j)] > v) dominant = false;
    }
    if (!dominant) continue;
    peaks.push_back(Peak{i, spectrum.range_of_bin(i), v});
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [](const Peak& a, const Peak& b) { return a.power_db > b.power_db; });
  if (static_cast<int>(peaks.size()) > max_peaks) {
    peaks.resize(static_cast<std::size_t>(max_peaks));
  }
  return peaks;
}

double srinr_db(const RangeSpectrum& spectrum, std::span<const sim::Target> targets,
                const sim::VictimRadar& victim) {
  if (targets.empty()) {
    throw std::invalid_argument("srinr: at least one target required");
  }
  const int n = static_cast<int>(spectrum.power_db.size());
  // 0 = noise, 1 = guard, 2 = target cell.
  std::vector<char> role(static_cast<std::size_t>(n), 0);
  int usable_targets = 0;
  for (const sim::Target& target : targets) {
    const double f_r = target.beat_frequency_hz(victim);
    const int center = static_cast<int>(std::llround(f_r / spectrum.bin_width_hz));
    if (center < 0 || center >= n) continue;  // outside the spectrum: skipped
    ++usable_targets;
    for (int j = std::max(0, center - 4); j <= std::min(n - 1, center + 4); ++j) {
      const int dist = std::abs(j - center);
      role[static_cast<std::size_t>(j)] =
          std::max<char>(role[static_cast<std::size_t>(j)], dist <= 1 ? 2 : 1);
    }
  }
  if (usable_targets == 0) {
    throw std::invalid_argument("srinr: every target maps outside the spectrum");
  }

  double target_power = 0.0, noise_power = 0.0;
  int target_cells = 0, noise_cells = 0;
  for (int i = 0; i < n; ++i) {
    const double linear = std::pow(10.0, spectrum.power_db[static_cast<std::size_t>(i)] / 10.0);
    if (role[static_cast<std::size_t>(i)] == 2) {
      target_power += linear;
      ++target_cells;
    } else if (role[static_cast<std::size_t>(i)] == 0) {
      noise_power += linear;
      ++noise_cells;
    }
  }
  if (noise_cells == 0) {
    throw std::invalid_argument("srinr: no noise cells left outside target and guard regions");
  }
  const double ratio = (target_power / static_cast<double>(target_cells)) /
                       (noise_power / static_cast<double>(noise_cells));
  return 10.0 * std::log10(std::max(ratio, 1.0e-30));
}

}  // namespace rim::spectral
