// Copyright 2026 The Binscape Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "binscape/fx/convolve.hpp"

#include <algorithm>
#include <complex>
#include <memory>
#include <mutex>

#include <fftw3.h>

namespace binscape::fx {
namespace {

// FFTW's planner is not re-entrant; execution of distinct plans is.
std::mutex planner_mutex;

struct FftwDeleter {
  void operator()(double* p) const { fftw_free(p); }
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    time_.reset(fftw_alloc_real(n));
    freq_.reset(fftw_alloc_complex(n / 2 + 1));
    std::lock_guard lock(planner_mutex);
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_.get(), freq_.get(), FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_.get(), time_.get(), FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }
  double* time() { return time_.get(); }
  fftw_complex* freq() { return freq_.get(); }
  void forward() { fftw_execute(forward_); }
  void inverse() { fftw_execute(inverse_); }

 private:
  std::size_t n_;
  std::unique_ptr<double[], FftwDeleter> time_;
  std::unique_ptr<fftw_complex[], FftwDeleter> freq_;
  fftw_plan forward_;
  fftw_plan inverse_;
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> fft_convolve(std::span<const double> signal, std::span<const double> kernel) {
  if (signal.empty() || kernel.empty()) return {};
  const std::size_t n = signal.size();
  const std::size_t m = kernel.size();
  std::vector<double> out(n + m - 1, 0.0);

  const std::size_t fft_size = next_pow2(std::max<std::size_t>(2 * m, 64) + m - 1);
  const std::size_t segment = fft_size - m + 1;
  RealFft fft(fft_size);
  const std::size_t bins = fft_size / 2 + 1;

  std::fill(fft.time(), fft.time() + fft_size, 0.0);
  std::copy(kernel.begin(), kernel.end(), fft.time());
  fft.forward();
  std::vector<std::complex<double>> kernel_spectrum(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    kernel_spectrum[k] = {fft.freq()[k][0], fft.freq()[k][1]};
  }

  const double scale = 1.0 / static_cast<double>(fft_size);
  for (std::size_t start = 0; start < n; start += segment) {
    const std::size_t len = std::min(segment, n - start);
    std::fill(fft.time(), fft.time() + fft_size, 0.0);
    std::copy_n(signal.begin() + static_cast<std::ptrdiff_t>(start), len, fft.time());
    fft.forward();
    for (std::size_t k = 0; k < bins; ++k) {
      const std::complex<double> x{fft.freq()[k][0], fft.freq()[k][1]};
      const auto y = x * kernel_spectrum[k];
      fft.freq()[k][0] = y.real();
      fft.freq()[k][1] = y.imag();
    }
    fft.inverse();
    const std::size_t produced = std::min(len + m - 1, out.size() - start);
    for (std::size_t i = 0; i < produced; ++i) out[start + i] += fft.time()[i] * scale;
  }
  return out;
}

}  // namespace binscape::fx
