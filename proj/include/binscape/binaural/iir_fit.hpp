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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/binaural/hrir_set.hpp"
#include "binscape/fx/biquad.hpp"

namespace binscape::binaural {

/// Magnitude-only approximation of one ear's response: a broadband gain
/// followed by order/2 peaking sections.
struct PeakingSection {
  double fc = 1000.0;
  double q = 1.0;
  double gain_db = 0.0;
};

struct EarFit {
  double gain_db = 0.0;
  std::vector<PeakingSection> sections;
  double error_db = 0.0;  ///< RMS log-magnitude error over the fit grid
  bool converged = true;

  /// Cascade realised at `fs`; the broadband gain is folded into the first
  /// section (or returned alone as a pass-through section).
  std::vector<fx::BiquadCoeffs> cascade(double fs) const;
  double linear_gain() const;
};

struct DirectionFit {
  EarFit left;
  EarFit right;
};

struct IirFitSet {
  int order = 6;
  int sample_rate = 48000;
  std::vector<Direction> grid;
  std::vector<DirectionFit> directions;
  std::vector<std::string> warnings;
};

inline constexpr double kFitLowHz = 300.0;
inline constexpr double kFitHighHz = 12000.0;
inline constexpr std::size_t kFitPoints = 64;

/// Log-spaced fit frequencies between kFitLowHz and kFitHighHz.
std::vector<double> fit_frequencies();

/// 20 log10 |DTFT| of `ir` at each of `freqs`, floored at -120 dB.
std::vector<double> magnitude_db(std::span<const float> ir, std::span<const double> freqs, double fs);

/// Model response in dB at `freqs`.
std::vector<double> fit_response_db(const EarFit& fit, std::span<const double> freqs, double fs);

/// RMS error of the best pure-gain fit (the mean of the target).
double flat_fit_error(std::span<const double> target_db);

/// Fits order/2 peaking sections plus a gain to a dB target by coordinate
/// descent from spectral-peak initial guesses. A fit that fails to converge
/// is replaced by the flat gain and flagged.
EarFit fit_magnitude(std::span<const double> target_db, std::span<const double> freqs, double fs,
                     int order);

/// Fits every direction and ear of `set`. `order` must be 4, 6 or 8.
IirFitSet fit_iir_approximation(const HrirSet& set, int order);

nlohmann::json to_json(const IirFitSet& fits);
IirFitSet fits_from_json(const nlohmann::json& doc);

}  // namespace binscape::binaural
