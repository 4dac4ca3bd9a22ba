#include "rim/baselines/mitigation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rim/errors.hpp"

namespace rim::baseline {

namespace {

double median_of(std::vector<double> values) {
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double upper = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() +
                                                               static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
  }
  return upper;
}

// Unit-energy rescale that leaves an all-zero frame untouched.
void renormalize(std::vector<double>& x) {
  double energy = 0.0;
  for (double v : x) energy += v * v;
  if (energy <= 0.0) return;
  const double inv = 1.0 / std::sqrt(energy);
  for (double& v : x) v *= inv;
}

}  // namespace

void MitigationConfig::validate() const {
  if (!(tdt_beta > 0.0) || !std::isfinite(tdt_beta)) {
    throw std::invalid_argument("tdt_beta must be positive");
  }
  if (envelope_window < 3 || envelope_window % 2 == 0) {
    throw std::invalid_argument("envelope_window must be odd and at least 3");
  }
}

TdtReplace tdt_replace_from_string(const std::string& name) {
  if (name == "zero") return TdtReplace::kZero;
  if (name == "interpolate" || name == "linear-interpolate") return TdtReplace::kInterpolate;
  throw FormatError("unknown tdt_replace mode: " + name);
}

std::string to_string(TdtReplace mode) {
  return mode == TdtReplace::kZero ? "zero" : "interpolate";
}

std::vector<double> tdt_mitigate(std::span<const double> frame, const MitigationConfig& config) {
  config.validate();
  std::vector<double> out(frame.begin(), frame.end());
  const std::size_t n = out.size();
  if (n == 0) return out;

  const double center = median_of(out);
  std::vector<double> deviation(n);
  for (std::size_t i = 0; i < n; ++i) deviation[i] = std::abs(out[i] - center);
  const double sigma = 1.4826 * median_of(deviation);
  if (sigma == 0.0) {
    return out;  // constant frame: nothing to threshold against
  }

  const double threshold = config.tdt_beta * sigma;
  std::vector<char> clipped(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    clipped[i] = std::abs(out[i]) > threshold ? 1 : 0;
  }

  if (config.tdt_replace == TdtReplace::kZero) {
    for (std::size_t i = 0; i < n; ++i) {
      if (clipped[i]) out[i] = 0.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (!clipped[i]) continue;
      std::ptrdiff_t left = static_cast<std::ptrdiff_t>(i) - 1;
      while (left >= 0 && clipped[static_cast<std::size_t>(left)]) --left;
      std::size_t right = i + 1;
      while (right < n && clipped[right]) ++right;
      const bool has_left = left >= 0;
      const bool has_right = right < n;
      if (has_left && has_right) {
        const double span = static_cast<double>(right - static_cast<std::size_t>(left));
        const double frac = static_cast<double>(i - static_cast<std::size_t>(left)) / span;
        out[i] = (1.0 - frac) * out[static_cast<std::size_t>(left)] + frac * out[right];
      } else if (has_left) {
        out[i] = out[static_cast<std::size_t>(left)];
      } else if (has_right) {
        out[i] = out[right];
      } else {
        out[i] = 0.0;  // every sample clipped
      }
    }
  }

  renormalize(out);
  return out;
}

std::vector<double> envelope_mitigate(std::span<const double> frame,
                                      const MitigationConfig& config) {
  config.validate();
  const std::size_t n = frame.size();
  std::vector<double> out(frame.begin(), frame.end());
  if (n == 0) return out;

  const int half = config.envelope_window / 2;
  // Reflective padding with the edge sample repeated, so windows near the
  // borders still average a full envelope_window of samples.
  auto padded_sq = [&](std::ptrdiff_t idx) {
    std::ptrdiff_t j = idx;
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(n) - 1;
    if (j < 0) j = -j - 1;
    if (j > last) j = 2 * last - j + 1;
    j = std::clamp<std::ptrdiff_t>(j, 0, last);
    const double v = frame[static_cast<std::size_t>(j)];
    return v * v;
  };

  const double window = static_cast<double>(config.envelope_window);
  std::vector<double> envelope(n);
  double acc = 0.0;
  for (std::ptrdiff_t j = -half; j <= half; ++j) acc += padded_sq(j);
  for (std::size_t i = 0; i < n; ++i) {
    envelope[i] = std::sqrt(std::max(acc / window, 0.0));
    acc += padded_sq(static_cast<std::ptrdiff_t>(i) + half + 1);
    acc -= padded_sq(static_cast<std::ptrdiff_t>(i) - half);
  }

  // Divisor floor: stationary tones and beats keep their envelope crests
  // within ~1.5x the median envelope, so division only bites where the local
  // envelope rises above that allowance. A bare epsilon floor would divide
  // through legitimate slow envelopes and shred clean multi-target frames.
  const double anchor = std::max(1.5 * median_of(envelope), 1.0e-6);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = frame[i] / std::max(envelope[i], anchor);
  }

  renormalize(out);
  return out;
}

std::vector<double> passthrough(std::span<const double> frame) {
  return std::vector<double>(frame.begin(), frame.end());
}

}  // namespace rim::baseline
