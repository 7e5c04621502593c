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
#include <filesystem>
#include <string>
#include <vector>

namespace binscape::binaural {

/// Azimuth counterclockwise from straight ahead (90 = left), degrees.
struct Direction {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;
  bool operator==(const Direction&) const = default;
};

/// Head-related impulse response pairs on a direction grid. All responses
/// share one length. Responses are expected to be time-aligned: interaural
/// delay is added separately from the head circumference.
struct HrirSet {
  std::string name;
  int sample_rate = 48000;
  std::size_t length = 0;
  std::vector<Direction> grid;
  std::vector<std::vector<float>> left;
  std::vector<std::vector<float>> right;

  std::size_t size() const noexcept { return grid.size(); }
  bool operator==(const HrirSet&) const = default;
};

/// Throws ParameterError describing the first broken invariant.
void check_hrir_set(const HrirSet& set);

/// Index of the grid direction with the smallest great-circle angle to the
/// query. Ties go to the lowest index.
std::size_t select_hrir(const HrirSet& set, double azimuth_deg, double elevation_deg);

/// Analytic spherical-head set: the Brown-Duda one-pole/one-zero head-shadow
/// filter per ear, 5 degree azimuth grid at elevations -30, 0 and 30.
/// Exactly left-right symmetric: right(az) is a copy of left(360 - az).
HrirSet synthetic_hrir_set(int sample_rate = 48000, std::size_t length = 128,
                           double head_circumference = 0.55);

/// Unit impulse on both ears for every direction of `grid`.
HrirSet identity_hrir_set(std::vector<Direction> grid, int sample_rate = 48000,
                          std::size_t length = 1);

/// Resamples every response; length follows the resampler's output length.
HrirSet resample_hrir_set(const HrirSet& set, int target_rate);

/// Directory package: index.json plus one stereo WAV per direction, named
/// az{A}_el{E}.wav.
HrirSet load_hrir_set(const std::filesystem::path& dir);
void save_hrir_set(const HrirSet& set, const std::filesystem::path& dir);

std::string hrir_filename(const Direction& d);

}  // namespace binscape::binaural
