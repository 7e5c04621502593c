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


#include "binscape/engine/engine.hpp"

#include <algorithm>
#include <cmath>

#include "binscape/audio/resample.hpp"
#include "binscape/audio/wav.hpp"
#include "binscape/error.hpp"
#include "binscape/model/validate.hpp"

namespace binscape::engine {
namespace {

double ramp(double from, double to, std::size_t i, std::size_t n) {
  if (from == to) return to;
  return from + (to - from) * static_cast<double>(i + 1) / static_cast<double>(n);
}

bool finite_number(const nlohmann::json& v) {
  return v.is_number() && std::isfinite(v.get<double>());
}

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 20.0); }

audio::AudioBuffer prepare_asset(const audio::AudioBuffer& decoded) {
  audio::check_buffer(decoded);
  auto mono = decoded.channel_count() == 1 ? decoded : audio::mixdown_mono(decoded);
  return audio::resample(mono, audio::kEngineRate);
}

AssetMap load_assets(const model::Soundscape& s, const model::Resolver& resolve) {
  AssetMap out;
  for (const auto& src : s.sources) {
    try {
      std::vector<std::uint8_t> bytes;
      if (src.asset.embedded) {
        bytes = src.asset.embedded->bytes;
      } else if (src.asset.uri && resolve) {
        bytes = resolve(*src.asset.uri);
      } else {
        throw IoError("no way to resolve the asset");
      }
      out.emplace(src.id, prepare_asset(audio::decode_wav(bytes)));
    } catch (const Error& e) {
      throw IoError("source '" + src.id + "': " + e.what());
    }
  }
  return out;
}

Engine::Engine(model::Soundscape s, const AssetMap& assets,
               std::shared_ptr<const binaural::HrirSet> hrirs, EngineOptions options)
    : scape_(std::move(s)), hrirs_(std::move(hrirs)), options_(std::move(options)) {
  const auto report = model::validate(scape_);
  for (const auto& issue : report.issues) {
    if (issue.severity == model::Severity::error) {
      throw ParameterError("invalid soundscape at " + issue.path + ": " + issue.message);
    }
  }
  binaural::check_model(options_.model);
  if (!hrirs_) throw ParameterError("engine needs an HRIR set");
  if (hrirs_->sample_rate != audio::kEngineRate) {
    hrirs_ = std::make_shared<const binaural::HrirSet>(
        binaural::resample_hrir_set(*hrirs_, audio::kEngineRate));
  }

  const double circumference = scape_.listener.head_circumference;
  lanes_.reserve(scape_.sources.size());
  for (const auto& src : scape_.sources) {
    const auto it = assets.find(src.id);
    if (it == assets.end()) throw ParameterError("source '" + src.id + "': asset not loaded");
    const auto& buf = it->second;
    const bool ready = buf.channel_count() == 1 && buf.sample_rate == audio::kEngineRate;
    auto samples = ready ? buf.channels[0] : prepare_asset(buf).channels[0];
    lanes_.emplace_back(std::move(samples), binaural::Spatializer(hrirs_, circumference,
                                                                  options_.mode, options_.fits));
    lanes_.back().gain = lanes_.back().gain_target = db_to_linear(src.gain_db);
  }
  for (std::size_t i = 0; i < scape_.sources.size(); ++i) {
    for (const auto& t : scape_.sources[i].timings) {
      const auto dep = *lane_index(t.after_source);
      auto& deps = t.mode == model::TimingMode::after_completes ? lanes_[i].completes_deps
                                                                 : lanes_[i].starts_deps;
      deps.push_back(dep);
    }
  }
  pose_ = {scape_.listener.position, scape_.listener.yaw};
  master_ = master_target_ = db_to_linear(scape_.listener.master_gain_db);
}

std::optional<std::size_t> Engine::lane_index(const std::string& id) const {
  for (std::size_t i = 0; i < scape_.sources.size(); ++i) {
    if (scape_.sources[i].id == id) return i;
  }
  return std::nullopt;
}

LaneInfo Engine::lane(std::size_t i) const {
  const auto& l = lanes_.at(i);
  return {scape_.sources[i].id, l.playing,         l.started,    l.cursor,
          l.completed_count,    l.reach,           l.start_blocks};
}

void Engine::set_param(Lane& lane, model::SoundSource& src, const std::string& path,
                       const nlohmann::json& value) {
  auto need_bool = [&] {
    if (!value.is_boolean()) throw ParameterError(path + " expects a boolean");
    return value.get<bool>();
  };
  auto need_number = [&] {
    if (!finite_number(value)) throw ParameterError(path + " expects a finite number");
    return value.get<double>();
  };
  if (path == "gain_db") {
    src.gain_db = need_number();
    lane.gain_target = db_to_linear(src.gain_db);
  } else if (path == "position") {
    if (!value.is_array() || value.size() != 2 || !finite_number(value[0]) ||
        !finite_number(value[1])) {
      throw ParameterError("position expects [x, y]");
    }
    model::Vec2 p{value[0].get<double>(), value[1].get<double>()};
    if (src.position_mode == model::PositionMode::absolute) p = scape_.room.clamp(p);
    src.position = p;
  } else if (path == "elevation") {
    src.elevation = need_number();
  } else if (path == "loop") {
    src.loop = need_bool();
  } else if (path == "reach_enabled") {
    src.reach_enabled = need_bool();
    if (transport_ == Transport::stopped) lane.reach = src.reach_enabled && !inside_reach(src) ? 0.0 : 1.0;
  } else if (path == "reach_radius") {
    const double r = need_number();
    if (!(r > 0.0)) throw ParameterError("reach_radius must be positive");
    src.reach_radius = r;
  } else if (path == "reach_fade_duration") {
    const double f = need_number();
    if (!(f >= 0.0)) throw ParameterError("reach_fade_duration must be >= 0");
    src.reach_fade_duration = f;
  } else if (path == "spatialized") {
    const bool on = need_bool();
    if (on && !src.spatialized) lane.spatializer.reset();
    src.spatialized = on;
  } else if (path == "start_on_enter") {
    src.start_on_enter = need_bool();
  } else if (path == "hidden") {
    src.hidden = need_bool();
  } else {
    throw ParameterError("unknown or immutable source parameter '" + path + "'");
  }
}

void Engine::apply(const ControlMessage& msg) {
  if (const auto* m = std::get_if<SetPose>(&msg)) {
    if (!std::isfinite(m->pose.position.x) || !std::isfinite(m->pose.position.y) ||
        !std::isfinite(m->pose.yaw)) {
      throw ParameterError("pose must be finite");
    }
    pose_.position = scape_.room.clamp(m->pose.position);
    pose_.yaw = m->pose.yaw;
  } else if (const auto* m = std::get_if<SetTransport>(&msg)) {
    if (m->value == Transport::stopped) {
      transport_ = Transport::stopped;
      reset_playback();
    } else if (transport_ == Transport::stopped) {
      reset_playback();
      transport_ = Transport::playing;
      // Reach gains start settled for the current pose.
      for (std::size_t i = 0; i < lanes_.size(); ++i) {
        const auto& src = scape_.sources[i];
        lanes_[i].reach = src.reach_enabled && !inside_reach(src) ? 0.0 : 1.0;
      }
    }
  } else if (const auto* m = std::get_if<SetSourceParam>(&msg)) {
    const auto idx = lane_index(m->source);
    if (!idx) throw ParameterError("unknown source '" + m->source + "'");
    // Apply to copies so a rejected value leaves the engine unchanged.
    auto src = scape_.sources[*idx];
    const double gain_target = lanes_[*idx].gain_target;
    const double reach = lanes_[*idx].reach;
    try {
      set_param(lanes_[*idx], src, m->path, m->value);
    } catch (...) {
      lanes_[*idx].gain_target = gain_target;
      lanes_[*idx].reach = reach;
      throw;
    }
    scape_.sources[*idx] = std::move(src);
  } else if (const auto* m = std::get_if<SetMasterGain>(&msg)) {
    if (!std::isfinite(m->gain_db)) throw ParameterError("master gain must be finite");
    scape_.listener.master_gain_db = m->gain_db;
    master_target_ = db_to_linear(m->gain_db);
  } else if (std::holds_alternative<StartRecord>(msg)) {
    start_recording();
  } else if (std::holds_alternative<StopRecord>(msg)) {
    finished_ = stop_recording();
  }
}

void Engine::post(ControlMessage msg) {
  std::lock_guard lock(queue_mutex_);
  queue_.push_back(std::move(msg));
}

void Engine::set_error_handler(std::function<void(const std::string&)> handler) {
  on_error_ = std::move(handler);
}

void Engine::drain() {
  std::vector<ControlMessage> pending;
  {
    std::lock_guard lock(queue_mutex_);
    pending.swap(queue_);
  }
  for (const auto& msg : pending) {
    try {
      apply(msg);
    } catch (const Error& e) {
      if (on_error_) on_error_(e.what());
    }
  }
}

void Engine::start_recording() {
  if (recorder_) throw ParameterError("already recording");
  recorder_.emplace(2, 0, audio::kEngineRate);
}

audio::AudioBuffer Engine::stop_recording() {
  if (!recorder_) throw ParameterError("stop_record without start_record");
  auto out = std::move(*recorder_);
  recorder_.reset();
  return out;
}

std::optional<audio::AudioBuffer> Engine::take_finished_recording() {
  auto out = std::move(finished_);
  finished_.reset();
  return out;
}

void Engine::reset_playback() {
  play_block_ = 0;
  for (auto& lane : lanes_) {
    lane.cursor = 0;
    lane.playing = false;
    lane.started = false;
    lane.was_inside = false;
    lane.completed_count = 0;
    lane.gain = lane.gain_target;
    lane.start_blocks.clear();
    lane.spatializer.reset();
  }
  master_ = master_target_;
}

bool Engine::inside_reach(const model::SoundSource& src) const {
  const auto p = model::resolve_position(src, pose_);
  return std::hypot(p.x - pose_.position.x, p.y - pose_.position.y) <= src.reach_radius;
}

void Engine::start_lane(Lane& lane) {
  lane.playing = true;
  lane.started = true;
  lane.cursor = 0;
  lane.start_blocks.push_back(play_block_);
  if (lane.samples.empty()) {
    lane.playing = false;
    ++lane.completed_count;
  }
}

void Engine::scheduler_tick() {
  std::vector<bool> inside(lanes_.size());
  std::vector<bool> entered(lanes_.size());
  for (std::size_t i = 0; i < lanes_.size(); ++i) {
    inside[i] = inside_reach(scape_.sources[i]);
    entered[i] = inside[i] && !lanes_[i].was_inside;
    lanes_[i].was_inside = inside[i];
  }
  // after_starts can fire within the same block, so iterate to a fixpoint.
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      auto& lane = lanes_[i];
      const auto& src = scape_.sources[i];
      if (lane.playing) continue;
      const bool first = !lane.started;
      const bool restart = lane.started && src.start_on_enter && !src.loop && entered[i] &&
                           lane.completed_count > 0;
      if (!first && !restart) continue;
      if (src.start_on_enter && !inside[i]) continue;
      const bool deps_ok =
          std::all_of(lane.completes_deps.begin(), lane.completes_deps.end(),
                      [&](std::size_t d) { return lanes_[d].completed_count > 0; }) &&
          std::all_of(lane.starts_deps.begin(), lane.starts_deps.end(),
                      [&](std::size_t d) { return lanes_[d].started; });
      if (!deps_ok) continue;
      start_lane(lane);
      changed = true;
    }
  }
}

void Engine::advance_reach(Lane& lane, const model::SoundSource& src, std::span<double> out) {
  if (!src.reach_enabled) {
    lane.reach = 1.0;
    std::fill(out.begin(), out.end(), 1.0);
    return;
  }
  const double target = inside_reach(src) ? 1.0 : 0.0;
  const double fade = src.reach_fade_duration;
  const double step = fade > 0.0 ? 1.0 / (fade * audio::kEngineRate) : 1.0;
  for (auto& g : out) {
    if (lane.reach < target) lane.reach = std::min(target, lane.reach + step);
    else if (lane.reach > target) lane.reach = std::max(target, lane.reach - step);
    g = lane.reach;
  }
}

void Engine::process_block(std::span<float> left, std::span<float> right) {
  constexpr std::size_t n = kBlockSize;
  if (left.size() != n || right.size() != n) {
    throw ParameterError("process_block needs " + std::to_string(n) + "-frame spans");
  }
  drain();
  std::fill(left.begin(), left.end(), 0.0f);
  std::fill(right.begin(), right.end(), 0.0f);

  if (transport_ == Transport::playing) {
    scheduler_tick();
    std::vector<double> sum_l(n, 0.0), sum_r(n, 0.0);
    std::vector<double> reach(n);
    std::vector<float> mono(n), out_l(n), out_r(n);
    for (std::size_t i = 0; i < lanes_.size(); ++i) {
      auto& lane = lanes_[i];
      const auto& src = scape_.sources[i];
      advance_reach(lane, src, reach);

      std::fill(mono.begin(), mono.end(), 0.0f);
      if (lane.playing) {
        const std::size_t len = lane.samples.size();
        for (std::size_t k = 0; k < n && lane.playing; ++k) {
          const double g = ramp(lane.gain, lane.gain_target, k, n) * reach[k];
          mono[k] = static_cast<float>(lane.samples[lane.cursor] * g);
          if (++lane.cursor == len) {
            ++lane.completed_count;
            lane.cursor = 0;
            if (!src.loop) lane.playing = false;
          }
        }
      }
      lane.gain = lane.gain_target;

      if (src.spatialized) {
        const auto p = model::resolve_position(src, pose_);
        const auto sp = binaural::source_pose(pose_.position.x, pose_.position.y, pose_.yaw, p.x,
                                              p.y, src.elevation);
        lane.spatializer.process(mono, sp, options_.model, out_l, out_r);
        for (std::size_t k = 0; k < n; ++k) {
          sum_l[k] += out_l[k];
          sum_r[k] += out_r[k];
        }
      } else {
        for (std::size_t k = 0; k < n; ++k) {
          sum_l[k] += mono[k];
          sum_r[k] += mono[k];
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double m = ramp(master_, master_target_, k, n);
      left[k] = static_cast<float>(sum_l[k] * m);
      right[k] = static_cast<float>(sum_r[k] * m);
    }
    master_ = master_target_;
    ++play_block_;
  }

  if (recorder_) {
    recorder_->channels[0].insert(recorder_->channels[0].end(), left.begin(), left.end());
    recorder_->channels[1].insert(recorder_->channels[1].end(), right.begin(), right.end());
  }
  clock_ += n;
}

audio::AudioBuffer Engine::render(std::size_t blocks) {
  audio::AudioBuffer out(2, blocks * kBlockSize, audio::kEngineRate);
  for (std::size_t b = 0; b < blocks; ++b) {
    const auto off = static_cast<std::ptrdiff_t>(b * kBlockSize);
    process_block({out.channels[0].data() + off, kBlockSize},
                  {out.channels[1].data() + off, kBlockSize});
  }
  return out;
}

Engine build_engine(model::Soundscape s, const AssetMap& assets,
                    std::shared_ptr<const binaural::HrirSet> hrirs, EngineOptions options) {
  return Engine(std::move(s), assets, std::move(hrirs), std::move(options));
}

}  // namespace binscape::engine
