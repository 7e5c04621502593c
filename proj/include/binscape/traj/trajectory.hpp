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

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/audio/buffer.hpp"
#include "binscape/engine/engine.hpp"
#include "binscape/model/soundscape.hpp"

namespace binscape::traj {

struct Waypoint {
  double t = 0.0;  ///< seconds
  model::Vec2 position;
  double yaw = 0.0;  ///< radians
  bool operator==(const Waypoint&) const = default;
};

/// Timed listener path. Waypoint times strictly increase from 0; duration
/// is at least the last waypoint time.
struct Trajectory {
  std::vector<Waypoint> waypoints;
  double duration = 0.0;
  bool operator==(const Trajectory&) const = default;
};

/// Throws ParameterError on a broken invariant.
void check_trajectory(const Trajectory& t);

/// Linear position, shorter-arc yaw, held after the last waypoint. Throws
/// ParameterError for t outside [0, duration].
model::ListenerPose pose_at(const Trajectory& traj, double t);

/// {"duration": s, "waypoints": [{"t", "position": [x, y], "yaw"}]}.
Trajectory trajectory_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Trajectory& t);

/// A single waypoint at the soundscape's stored listener pose.
Trajectory static_trajectory(const model::Soundscape& s, double duration);

/// Renders the soundscape along `traj`: a pose update at every block
/// boundary, transport play at t = 0, ceil(duration * fs / N) * N frames.
audio::AudioBuffer render_offline(const model::Soundscape& s, const Trajectory& traj,
                                  const engine::AssetMap& assets,
                                  std::shared_ptr<const binaural::HrirSet> hrirs,
                                  engine::EngineOptions options = {});

}  // namespace binscape::traj
