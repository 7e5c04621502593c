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
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/audio/buffer.hpp"
#include "binscape/binaural/spatializer.hpp"
#include "binscape/model/embed.hpp"
#include "binscape/model/soundscape.hpp"

namespace binscape::engine {

/// Frames per engine block at the 48 kHz engine rate.
inline constexpr std::size_t kBlockSize = 128;

enum class Transport { stopped, playing };

struct SetPose {
  model::ListenerPose pose;
};
struct SetTransport {
  Transport value = Transport::playing;
};
/// Mutable paths: gain_db, position, elevation, loop, reach_enabled,
/// reach_radius, reach_fade_duration, spatialized, start_on_enter, hidden.
struct SetSourceParam {
  std::string source;
  std::string path;
  nlohmann::json value;
};
struct SetMasterGain {
  double gain_db = 0.0;
};
struct StartRecord {};
struct StopRecord {};

using ControlMessage =
    std::variant<SetPose, SetTransport, SetSourceParam, SetMasterGain, StartRecord, StopRecord>;

/// Mono engine-rate audio per source id.
using AssetMap = std::map<std::string, audio::AudioBuffer>;

struct EngineOptions {
  binaural::SpatialMode mode = binaural::SpatialMode::full_hrir;
  std::shared_ptr<const binaural::IirFitSet> fits;
  binaural::DistanceModel model;
};

/// Observable per-source state, for tests and diagnostics.
struct LaneInfo {
  std::string id;
  bool playing = false;
  bool started = false;
  std::size_t cursor = 0;
  std::uint64_t completed_count = 0;
  double reach_gain = 1.0;
  /// Blocks (counted from transport play) at which the source started.
  std::vector<std::uint64_t> start_blocks;
};

/// Mixes down and resamples to mono at the engine rate.
audio::AudioBuffer prepare_asset(const audio::AudioBuffer& decoded);

/// Decodes every source's asset (embedded bytes or `resolve(uri)`) and
/// prepares it for the engine. Errors name the source.
AssetMap load_assets(const model::Soundscape& s, const model::Resolver& resolve);

class Engine {
 public:
  /// Throws ParameterError if `s` has validation errors or a source has no
  /// asset. Assets that are not mono 48 kHz are converted.
  Engine(model::Soundscape s, const AssetMap& assets,
         std::shared_ptr<const binaural::HrirSet> hrirs, EngineOptions options = {});

  /// Applies a message now. Rejected messages throw ParameterError and leave
  /// the engine unchanged.
  void apply(const ControlMessage& msg);

  /// Queues a message from any thread; applied at the next block boundary.
  /// Rejections are reported through the error handler.
  void post(ControlMessage msg);
  void set_error_handler(std::function<void(const std::string&)> handler);

  /// Renders one block of kBlockSize frames.
  void process_block(std::span<float> left, std::span<float> right);

  /// Renders `blocks` blocks into a stereo buffer.
  audio::AudioBuffer render(std::size_t blocks);

  void start_recording();
  /// Throws ParameterError when no recording is running.
  audio::AudioBuffer stop_recording();
  bool recording() const noexcept { return recorder_.has_value(); }
  /// Result of the last StopRecord message, if not yet taken.
  std::optional<audio::AudioBuffer> take_finished_recording();

  Transport transport() const noexcept { return transport_; }
  std::uint64_t clock() const noexcept { return clock_; }
  const model::ListenerPose& pose() const noexcept { return pose_; }
  const model::Soundscape& soundscape() const noexcept { return scape_; }
  std::size_t lane_count() const noexcept { return lanes_.size(); }
  LaneInfo lane(std::size_t i) const;
  std::optional<std::size_t> lane_index(const std::string& id) const;

 private:
  struct Lane {
    Lane(std::vector<float> s, binaural::Spatializer sp)
        : samples(std::move(s)), spatializer(std::move(sp)) {}
    std::vector<float> samples;
    binaural::Spatializer spatializer;
    std::vector<std::size_t> completes_deps;
    std::vector<std::size_t> starts_deps;
    std::size_t cursor = 0;
    bool playing = false;
    bool started = false;
    bool was_inside = false;
    std::uint64_t completed_count = 0;
    double gain = 1.0;
    double gain_target = 1.0;
    double reach = 1.0;
    std::vector<std::uint64_t> start_blocks;
  };

  void set_param(Lane& lane, model::SoundSource& src, const std::string& path,
                 const nlohmann::json& value);
  void reset_playback();
  bool inside_reach(const model::SoundSource& src) const;
  void scheduler_tick();
  void start_lane(Lane& lane);
  void advance_reach(Lane& lane, const model::SoundSource& src, std::span<double> out);
  void drain();

  model::Soundscape scape_;
  std::shared_ptr<const binaural::HrirSet> hrirs_;
  EngineOptions options_;
  std::vector<Lane> lanes_;
  model::ListenerPose pose_;
  Transport transport_ = Transport::stopped;
  double master_ = 1.0;
  double master_target_ = 1.0;
  std::uint64_t clock_ = 0;
  std::uint64_t play_block_ = 0;
  std::optional<audio::AudioBuffer> recorder_;
  std::optional<audio::AudioBuffer> finished_;

  std::mutex queue_mutex_;
  std::vector<ControlMessage> queue_;
  std::function<void(const std::string&)> on_error_;
};

/// Engine construction with the defaults used by the CLI and service.
Engine build_engine(model::Soundscape s, const AssetMap& assets,
                    std::shared_ptr<const binaural::HrirSet> hrirs, EngineOptions options = {});

double db_to_linear(double db);

}  // namespace binscape::engine
