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

namespace binscape::binaural {

inline constexpr double kSpeedOfSound = 343.0;
inline constexpr double kOpenCutoffHz = 20000.0;
inline constexpr double kMinCutoffHz = 1000.0;
/// Distance beyond the far field over which the air-absorption cutoff halves.
inline constexpr double kHalvingDistance = 15.0;
inline constexpr double kNearFieldShelfHz = 2000.0;
inline constexpr double kNearFieldMaxDb = 6.0;

struct DistanceModel {
  double reference_distance = 1.0;
  double attenuation_db_per_m = 3.0;
  double near_field_radius = 1.5;
  double far_field_distance = 15.0;
};

/// Throws ParameterError on a broken invariant.
void check_model(const DistanceModel& m);

struct EarDelays {
  double left_s = 0.0;
  double right_s = 0.0;
};

/// Woodworth spherical-head ITD with r = circumference / 2 pi. The whole
/// difference goes to the far ear. Positive azimuth is to the left.
EarDelays itd_delays(double head_circumference_m, double azimuth_rad, double elevation_rad);

/// 10^(-k * max(d - d_ref, 0) / 20); never boosts below the reference.
double distance_gain(double distance_m, const DistanceModel& m);

/// 20 kHz up to the far-field distance, halving every 15 m beyond it,
/// floored at 1 kHz.
double air_absorption_cutoff(double distance_m, const DistanceModel& m);

struct ShelfGains {
  double left_db = 0.0;
  double right_db = 0.0;
};

/// High-shelf gains inside the near field: +g on the near ear, -g on the far
/// ear with g = 6 (1 - d / r_near) |sin(azimuth)| dB.
ShelfGains near_field_ild_gains(double distance_m, double azimuth_rad, const DistanceModel& m);

}  // namespace binscape::binaural
