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


#include "binscape/fx/biquad.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "binscape/error.hpp"

namespace binscape::fx {

BiquadCoeffs biquad_coeffs(FilterKind kind, double fc, double q, double gain_db, double fs) {
  if (!(fs > 0.0)) throw ParameterError("sample rate must be positive");
  if (!(fc > 0.0 && fc < fs / 2.0)) {
    throw ParameterError("cutoff " + std::to_string(fc) + " Hz outside (0, " +
                         std::to_string(fs / 2.0) + ") Hz");
  }
  if (!(q > 0.0) || !std::isfinite(q)) throw ParameterError("q must be positive");
  if (!std::isfinite(gain_db)) throw ParameterError("gain must be finite");

  const double w0 = 2.0 * std::numbers::pi * fc / fs;
  const double cw = std::cos(w0);
  const double sw = std::sin(w0);
  const double alpha = sw / (2.0 * q);
  const double A = std::pow(10.0, gain_db / 40.0);

  double b0, b1, b2, a0, a1, a2;
  switch (kind) {
    case FilterKind::lowpass:
      b0 = (1.0 - cw) / 2.0; b1 = 1.0 - cw; b2 = b0;
      a0 = 1.0 + alpha; a1 = -2.0 * cw; a2 = 1.0 - alpha;
      break;
    case FilterKind::highpass:
      b0 = (1.0 + cw) / 2.0; b1 = -(1.0 + cw); b2 = b0;
      a0 = 1.0 + alpha; a1 = -2.0 * cw; a2 = 1.0 - alpha;
      break;
    case FilterKind::bandpass:
      b0 = alpha; b1 = 0.0; b2 = -alpha;
      a0 = 1.0 + alpha; a1 = -2.0 * cw; a2 = 1.0 - alpha;
      break;
    case FilterKind::notch:
      b0 = 1.0; b1 = -2.0 * cw; b2 = 1.0;
      a0 = 1.0 + alpha; a1 = -2.0 * cw; a2 = 1.0 - alpha;
      break;
    case FilterKind::peaking:
      b0 = 1.0 + alpha * A; b1 = -2.0 * cw; b2 = 1.0 - alpha * A;
      a0 = 1.0 + alpha / A; a1 = -2.0 * cw; a2 = 1.0 - alpha / A;
      break;
    case FilterKind::lowshelf: {
      const double k = 2.0 * std::sqrt(A) * alpha;
      b0 = A * ((A + 1.0) - (A - 1.0) * cw + k);
      b1 = 2.0 * A * ((A - 1.0) - (A + 1.0) * cw);
      b2 = A * ((A + 1.0) - (A - 1.0) * cw - k);
      a0 = (A + 1.0) + (A - 1.0) * cw + k;
      a1 = -2.0 * ((A - 1.0) + (A + 1.0) * cw);
      a2 = (A + 1.0) + (A - 1.0) * cw - k;
      break;
    }
    case FilterKind::highshelf: {
      const double k = 2.0 * std::sqrt(A) * alpha;
      b0 = A * ((A + 1.0) + (A - 1.0) * cw + k);
      b1 = -2.0 * A * ((A - 1.0) + (A + 1.0) * cw);
      b2 = A * ((A + 1.0) + (A - 1.0) * cw - k);
      a0 = (A + 1.0) - (A - 1.0) * cw + k;
      a1 = 2.0 * ((A - 1.0) - (A + 1.0) * cw);
      a2 = (A + 1.0) - (A - 1.0) * cw - k;
      break;
    }
    default:
      throw ParameterError("unknown filter kind");
  }
  return {b0 / a0, b1 / a0, b2 / a0, a1 / a0, a2 / a0};
}

std::complex<double> response(const BiquadCoeffs& c, double f, double fs) {
  const double w = 2.0 * std::numbers::pi * f / fs;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  return (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
}

}  // namespace binscape::fx
