#pragma once

#include <span>
#include <string>
#include <vector>

namespace rim::baseline {

enum class TdtReplace { kZero, kInterpolate };

struct MitigationConfig {
  double tdt_beta = 3.0;
  TdtReplace tdt_replace = TdtReplace::kZero;
  int envelope_window = 31;  // odd, >= 3

  void validate() const;
};

TdtReplace tdt_replace_from_string(const std::string& name);
std::string to_string(TdtReplace mode);

// Time-domain thresholding: samples whose magnitude exceeds
// tdt_beta * (MAD-based robust sigma) are zeroed or bridged by linear
// interpolation from the nearest surviving neighbors, then the frame is
// rescaled to unit energy. A constant frame (zero robust sigma) passes
// through unchanged.
std::vector<double> tdt_mitigate(std::span<const double> frame, const MitigationConfig& config);

// Threshold-free suppression: divide by the sliding-RMS envelope
// (edge-repeating reflective padding), floored at 1.5x the median envelope
// so legitimate envelope crests pass cleanly, then rescale to unit energy.
std::vector<double> envelope_mitigate(std::span<const double> frame,
                                      const MitigationConfig& config);

std::vector<double> passthrough(std::span<const double> frame);

}  // namespace rim::baseline
