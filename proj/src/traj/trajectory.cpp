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


#include "binscape/traj/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binscape/error.hpp"

namespace binscape::traj {

void check_trajectory(const Trajectory& t) {
  if (t.waypoints.empty()) throw ParameterError("trajectory needs at least one waypoint");
  if (t.waypoints.front().t != 0.0) throw ParameterError("first waypoint must be at t = 0");
  for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
    const auto& w = t.waypoints[i];
    if (!std::isfinite(w.t) || !std::isfinite(w.position.x) || !std::isfinite(w.position.y) ||
        !std::isfinite(w.yaw)) {
      throw ParameterError("waypoint " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(w.t > t.waypoints[i - 1].t)) {
      throw ParameterError("waypoint times must strictly increase (waypoint " +
                           std::to_string(i) + ")");
    }
  }
  if (!std::isfinite(t.duration) || t.duration < t.waypoints.back().t) {
    throw ParameterError("duration must be at least the last waypoint time");
  }
}

model::ListenerPose pose_at(const Trajectory& traj, double t) {
  if (!(t >= 0.0 && t <= traj.duration)) {
    throw ParameterError("time " + std::to_string(t) + " outside [0, duration]");
  }
  const auto& w = traj.waypoints;
  const auto next = std::upper_bound(w.begin(), w.end(), t,
                                     [](double v, const Waypoint& p) { return v < p.t; });
  if (next == w.end()) return {w.back().position, w.back().yaw};
  const auto& b = *next;
  const auto& a = *(next - 1);
  if (t == a.t) return {a.position, a.yaw};
  const double u = (t - a.t) / (b.t - a.t);
  const double two_pi = 2.0 * std::numbers::pi;
  const double dyaw = std::remainder(b.yaw - a.yaw, two_pi);
  return {{a.position.x + (b.position.x - a.position.x) * u,
           a.position.y + (b.position.y - a.position.y) * u},
          a.yaw + dyaw * u};
}

Trajectory trajectory_from_json(const nlohmann::json& doc) {
  Trajectory t;
  try {
    if (!doc.is_object()) throw ParseError("", "trajectory must be an object");
    t.duration = doc.at("duration").get<double>();
    const auto& pts = doc.at("waypoints");
    if (!pts.is_array()) throw ParseError("/waypoints", "expected an array");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      const auto& pos = p.at("position");
      if (!pos.is_array() || pos.size() != 2) {
        throw ParseError("/waypoints/" + std::to_string(i) + "/position", "expected [x, y]");
      }
      t.waypoints.push_back({p.at("t").get<double>(),
                             {pos[0].get<double>(), pos[1].get<double>()},
                             p.value("yaw", 0.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("", std::string("bad trajectory: ") + e.what());
  }
  check_trajectory(t);
  return t;
}

nlohmann::json to_json(const Trajectory& t) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& w : t.waypoints) {
    pts.push_back({{"t", w.t}, {"position", {w.position.x, w.position.y}}, {"yaw", w.yaw}});
  }
  return {{"duration", t.duration}, {"waypoints", std::move(pts)}};
}

Trajectory static_trajectory(const model::Soundscape& s, double duration) {
  return {{{0.0, s.listener.position, s.listener.yaw}}, duration};
}

audio::AudioBuffer render_offline(const model::Soundscape& s, const Trajectory& traj,
                                  const engine::AssetMap& assets,
                                  std::shared_ptr<const binaural::HrirSet> hrirs,
                                  engine::EngineOptions options) {
  check_trajectory(traj);
  engine::Engine eng(s, assets, std::move(hrirs), std::move(options));
  const double fs = audio::kEngineRate;
  const auto n = engine::kBlockSize;
  const auto blocks = static_cast<std::size_t>(std::ceil(traj.duration * fs / double(n)));

  audio::AudioBuffer out(2, blocks * n, audio::kEngineRate);
  eng.apply(engine::SetPose{pose_at(traj, 0.0)});
  eng.apply(engine::SetTransport{engine::Transport::playing});
  for (std::size_t b = 0; b < blocks; ++b) {
    const double t = std::min(static_cast<double>(b * n) / fs, traj.duration);
    eng.apply(engine::SetPose{pose_at(traj, t)});
    const auto off = static_cast<std::ptrdiff_t>(b * n);
    eng.process_block({out.channels[0].data() + off, n}, {out.channels[1].data() + off, n});
  }
  return out;
}

}  // namespace binscape::traj
