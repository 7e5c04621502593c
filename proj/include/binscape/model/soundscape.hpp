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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace binscape::model {

/// Current document format.
inline constexpr int kFormatVersion = 1;

/// Ear height above the floor. Source elevations are offsets from this plane.
inline constexpr double kEarHeight = 1.6;

/// Room-frame point. Origin at the room centre, +x toward width (right on the
/// floor plan), +y toward depth (up on the floor plan).
struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

enum class RoomShape { rectangular, round };
enum class PositionMode { absolute, relative };
enum class TimingMode { after_completes, after_starts };

/// Embedded payload of an asset or floor plan.
struct EmbeddedData {
  std::vector<std::uint8_t> bytes;
  std::string media_type;
  bool operator==(const EmbeddedData&) const = default;
};

/// Opaque floor-plan image reference. Exactly one of uri/embedded is set.
struct ImageRef {
  std::optional<std::string> uri;
  std::optional<EmbeddedData> embedded;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const ImageRef&) const = default;
};

struct Room {
  RoomShape shape = RoomShape::rectangular;
  double width = 10.0;
  double depth = 10.0;
  double height = 3.0;
  std::optional<ImageRef> floorplan;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const Room&) const = default;

  /// Closed containment test: per-axis for rectangles, ellipse inequality
  /// with semi-axes width/2 and depth/2 for round rooms.
  bool contains(Vec2 p) const;
  /// Nearest admissible point: per-axis clamp for rectangles, radial
  /// projection onto the ellipse for round rooms.
  Vec2 clamp(Vec2 p) const;
};

struct ListenerConfig {
  Vec2 position;
  double yaw = 0.0;  ///< radians, 0 faces +y, counterclockwise positive
  double head_circumference = 0.55;
  double master_gain_db = 0.0;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const ListenerConfig&) const = default;
};

struct TimingConstraint {
  std::string after_source;
  TimingMode mode = TimingMode::after_completes;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const TimingConstraint&) const = default;
};

/// Exactly one of uri/embedded is set. channels/sample_rate/duration describe
/// the decoded audio and are recomputed whenever bytes are embedded.
struct AssetRef {
  std::optional<std::string> uri;
  std::optional<EmbeddedData> embedded;
  int channels = 1;
  int sample_rate = 48000;
  double duration = 0.0;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const AssetRef&) const = default;
};

struct SoundSource {
  std::string id;
  std::string name;
  AssetRef asset;
  PositionMode position_mode = PositionMode::absolute;
  Vec2 position;  ///< room frame if absolute, listener frame if relative
  double elevation = 0.0;
  double gain_db = 0.0;
  bool loop = false;
  bool reach_enabled = false;
  double reach_radius = 1.0;
  double reach_fade_duration = 0.0;
  bool start_on_enter = false;
  bool hidden = false;  ///< UI-only; never affects audio
  bool spatialized = true;
  std::vector<TimingConstraint> timings;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const SoundSource&) const = default;
};

struct Soundscape {
  int format_version = kFormatVersion;
  std::string title;
  std::string description;
  std::vector<std::string> tags;
  Room room;
  ListenerConfig listener;
  std::vector<SoundSource> sources;
  nlohmann::json extra = nlohmann::json::object();
  bool operator==(const Soundscape&) const = default;

  const SoundSource* find(const std::string& id) const;
  SoundSource* find(const std::string& id);
};

struct ListenerPose {
  Vec2 position;
  double yaw = 0.0;
  bool operator==(const ListenerPose&) const = default;
};

/// Room-frame position of a source. Relative offsets are rotated
/// counterclockwise by the listener yaw and translated by its position.
Vec2 resolve_position(const SoundSource& src, const ListenerPose& listener);

const char* to_string(RoomShape v);
const char* to_string(PositionMode v);
const char* to_string(TimingMode v);

}  // namespace binscape::model
