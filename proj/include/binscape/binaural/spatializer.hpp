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

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "binscape/binaural/cues.hpp"
#include "binscape/binaural/hrir_set.hpp"
#include "binscape/binaural/iir_fit.hpp"
#include "binscape/fx/biquad.hpp"

namespace binscape::binaural {

/// Source direction relative to the listener's head. Radians; positive
/// azimuth is to the left.
struct SourcePose {
  double azimuth = 0.0;
  double elevation = 0.0;
  double distance = 1.0;
};

/// Pose of a source at room point (sx, sy) with height offset `elevation_m`
/// for a listener at (lx, ly) with yaw `yaw` (0 faces +y, counterclockwise).
SourcePose source_pose(double lx, double ly, double yaw, double sx, double sy, double elevation_m);

enum class SpatialMode { full_hrir, high_performance };

/// Longest interaural delay the delay line supports, in samples. Covers the
/// largest valid head circumference at 48 kHz with margin.
inline constexpr std::size_t kMaxDelaySamples = 64;

/// Per-source spatializer state. Single owner; the HRIR set and fits are
/// shared read-only.
class Spatializer {
 public:
  /// High-performance mode requires `fits` computed for `hrirs`.
  Spatializer(std::shared_ptr<const HrirSet> hrirs, double head_circumference,
              SpatialMode mode = SpatialMode::full_hrir,
              std::shared_ptr<const IirFitSet> fits = nullptr);

  /// Spatializes one mono block into `left` and `right` (same length as
  /// `mono`; any length is accepted). Gain and delays ramp from the previous
  /// call's values across the block; an HRIR change crossfades for one block.
  void process(std::span<const float> mono, const SourcePose& pose, const DistanceModel& model,
               std::span<float> left, std::span<float> right);

  /// Back to the freshly constructed state.
  void reset();

  SpatialMode mode() const noexcept { return mode_; }
  std::size_t current_index() const noexcept { return index_; }

 private:
  struct Ear {
    std::vector<double> tail;          // overlap-add carry, length L - 1
    std::vector<fx::Biquad> cascade;   // high-performance filters
    fx::Biquad shelf;
    double shelf_db = 0.0;
    double delay = 0.0;                // samples
  };

  void convolve_ear(Ear& ear, std::span<const double> in, const std::vector<float>& ir_new,
                    const std::vector<float>* ir_old, std::span<double> out) const;
  void cascade_ear(Ear& ear, bool is_left, std::span<const double> in, bool changed,
                   std::span<double> out) const;
  std::vector<fx::Biquad> make_cascade(std::size_t index, bool is_left) const;

  std::shared_ptr<const HrirSet> hrirs_;
  std::shared_ptr<const IirFitSet> fits_;
  double circumference_;
  SpatialMode mode_;

  bool primed_ = false;
  std::size_t index_ = 0;
  double gain_ = 1.0;
  double air_state_ = 0.0;
  std::vector<double> history_;  // last kMaxDelaySamples + 1 filtered inputs
  std::array<Ear, 2> ears_;
};

/// Stereo result of spatialize_block.
struct StereoBlock {
  std::vector<float> left;
  std::vector<float> right;
};

StereoBlock spatialize_block(Spatializer& state, std::span<const float> mono,
                             const SourcePose& pose, const DistanceModel& model);

}  // namespace binscape::binaural
