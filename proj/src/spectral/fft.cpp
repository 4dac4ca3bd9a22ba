#include "rim/spectral/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "rim/common.hpp"

namespace rim::spectral {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_pow2(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 1.0 : -1.0) * kTwoPi / static_cast<double>(len);
    const Complex wn(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      Complex w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const Complex u = a[i + j];
        const Complex v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wn;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& x : a) x *= scale;
  }
}

// Precomputed Bluestein machinery for one transform size.
struct BluesteinPlan {
  std::size_t n = 0, m = 0;
  std::vector<Complex> chirp;      // exp(-i*pi*k^2/n), k = 0..n-1
  std::vector<Complex> kernel_fft;  // FFT of the zero-padded conjugate chirp
};

const BluesteinPlan& plan_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, BluesteinPlan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = plans.find(n);
  if (it != plans.end()) return it->second;

  BluesteinPlan plan;
  plan.n = n;
  plan.m = next_pow2(2 * n - 1);
  plan.chirp.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small for large sizes.
    const std::size_t k2 = (k * k) % (2 * n);
    const double angle = -kPi * static_cast<double>(k2) / static_cast<double>(n);
    plan.chirp[k] = Complex(std::cos(angle), std::sin(angle));
  }
  std::vector<Complex> kernel(plan.m, Complex(0.0, 0.0));
  kernel[0] = std::conj(plan.chirp[0]);
  for (std::size_t k = 1; k < n; ++k) {
    kernel[k] = std::conj(plan.chirp[k]);
    kernel[plan.m - k] = std::conj(plan.chirp[k]);
  }
  fft_pow2(kernel, false);
  plan.kernel_fft = std::move(kernel);
  return plans.emplace(n, std::move(plan)).first->second;
}

void bluestein(std::vector<Complex>& a, bool inverse) {
  const std::size_t n = a.size();
  const BluesteinPlan& plan = plan_for(n);

  if (inverse) {
    for (Complex& x : a) x = std::conj(x);
  }
  std::vector<Complex> work(plan.m, Complex(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    work[k] = a[k] * plan.chirp[k];
  }
  fft_pow2(work, false);
  for (std::size_t k = 0; k < plan.m; ++k) {
    work[k] *= plan.kernel_fft[k];
  }
  fft_pow2(work, true);
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = work[k] * plan.chirp[k];
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (Complex& x : a) x = std::conj(x) * scale;
  }
}

}  // namespace

void fft_inplace(std::vector<Complex>& data, bool inverse) {
  if (data.empty()) {
    throw std::invalid_argument("fft: empty input");
  }
  if (data.size() == 1) return;
  if (is_pow2(data.size())) {
    fft_pow2(data, inverse);
  } else {
    bluestein(data, inverse);
  }
}

std::vector<Complex> fft(std::vector<Complex> data, bool inverse) {
  fft_inplace(data, inverse);
  return data;
}

}  // namespace rim::spectral
