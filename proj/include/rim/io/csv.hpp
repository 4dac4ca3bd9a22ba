#pragma once

#include <span>
#include <string>
#include <vector>

#include "rim/spectral/spectrum.hpp"

namespace rim::io {

// One sample per line. Throws FormatError naming the offending line for
// non-numeric content, or the expected length when the count is wrong.
std::vector<double> read_frame_csv(const std::string& path, int expected_len);

void write_frame_csv(const std::string& path, std::span<const double> frame);

// Columns: bin_hz, range_m, power_db (with header line).
void write_spectrum_csv(const std::string& path, const spectral::RangeSpectrum& spectrum);

}  // namespace rim::io
