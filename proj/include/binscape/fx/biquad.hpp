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


#pragma once

#include <complex>
#include <span>

namespace binscape::fx {

enum class FilterKind { lowpass, highpass, bandpass, lowshelf, highshelf, peaking, notch };

/// a0-normalized second-order section:
/// H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)
struct BiquadCoeffs {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0, a1 = 0.0, a2 = 0.0;
  bool operator==(const BiquadCoeffs&) const = default;
};

/// Audio EQ Cookbook (R. Bristow-Johnson) designs. Shelves use the Q form of
/// alpha; bandpass is the constant 0 dB peak-gain variant. Throws
/// ParameterError unless 0 < fc < fs/2 and q > 0.
BiquadCoeffs biquad_coeffs(FilterKind kind, double fc, double q, double gain_db, double fs);

/// Transfer function at frequency `f`.
std::complex<double> response(const BiquadCoeffs& c, double f, double fs);

/// Transposed direct form II state.
struct Biquad {
  BiquadCoeffs c;
  double z1 = 0.0;
  double z2 = 0.0;

  double process(double x) noexcept {
    const double y = c.b0 * x + z1;
    z1 = c.b1 * x - c.a1 * y + z2;
    z2 = c.b2 * x - c.a2 * y;
    return y;
  }
  void process(std::span<float> samples) noexcept {
    for (float& s : samples) s = static_cast<float>(process(s));
  }
  void reset() noexcept { z1 = z2 = 0.0; }
};

}  // namespace binscape::fx
