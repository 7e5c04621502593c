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


#include "binscape/binaural/cues.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binscape/error.hpp"

namespace binscape::binaural {

void check_model(const DistanceModel& m) {
  if (!(m.reference_distance > 0.0)) throw ParameterError("reference distance must be positive");
  if (!(m.attenuation_db_per_m >= 0.0)) throw ParameterError("attenuation must be >= 0 dB/m");
  if (!(m.near_field_radius >= 0.0)) throw ParameterError("near-field radius must be >= 0");
  if (!(m.far_field_distance > m.near_field_radius)) {
    throw ParameterError("far-field distance must exceed the near-field radius");
  }
}

EarDelays itd_delays(double head_circumference_m, double azimuth_rad, double elevation_rad) {
  const double radius = head_circumference_m / (2.0 * std::numbers::pi);
  const double lateral = std::sin(azimuth_rad) * std::cos(elevation_rad);
  const double theta = std::asin(std::min(1.0, std::abs(lateral)));
  const double itd = radius / kSpeedOfSound * (theta + std::sin(theta));
  if (lateral > 0.0) return {0.0, itd};  // source on the left: right ear is far
  if (lateral < 0.0) return {itd, 0.0};
  return {};
}

double distance_gain(double distance_m, const DistanceModel& m) {
  const double excess = std::max(distance_m - m.reference_distance, 0.0);
  return std::pow(10.0, -m.attenuation_db_per_m * excess / 20.0);
}

double air_absorption_cutoff(double distance_m, const DistanceModel& m) {
  if (distance_m <= m.far_field_distance) return kOpenCutoffHz;
  const double cutoff =
      kOpenCutoffHz * std::exp2(-(distance_m - m.far_field_distance) / kHalvingDistance);
  return std::max(cutoff, kMinCutoffHz);
}

ShelfGains near_field_ild_gains(double distance_m, double azimuth_rad, const DistanceModel& m) {
  if (!(distance_m < m.near_field_radius)) return {};
  const double s = std::sin(azimuth_rad);
  const double g = kNearFieldMaxDb * (1.0 - distance_m / m.near_field_radius) * std::abs(s);
  if (s > 0.0) return {g, -g};
  if (s < 0.0) return {-g, g};
  return {};
}

}  // namespace binscape::binaural
