#pragma once

#include <complex>
#include <vector>

namespace rim::spectral {

using Complex = std::complex<double>;

// In-place DFT of arbitrary length: iterative radix-2 for powers of two,
// Bluestein's chirp-z otherwise. Inverse includes the 1/N scale.
void fft_inplace(std::vector<Complex>& data, bool inverse = false);

std::vector<Complex> fft(std::vector<Complex> data, bool inverse = false);

}  // namespace rim::spectral
