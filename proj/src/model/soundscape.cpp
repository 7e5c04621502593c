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


#include "binscape/model/soundscape.hpp"

#include <algorithm>
#include <cmath>

namespace binscape::model {

bool Room::contains(Vec2 p) const {
  const double a = width / 2.0;
  const double b = depth / 2.0;
  if (shape == RoomShape::rectangular) {
    return std::abs(p.x) <= a && std::abs(p.y) <= b;
  }
  const double u = p.x / a;
  const double v = p.y / b;
  return u * u + v * v <= 1.0;
}

Vec2 Room::clamp(Vec2 p) const {
  const double a = width / 2.0;
  const double b = depth / 2.0;
  if (shape == RoomShape::rectangular) {
    return {std::clamp(p.x, -a, a), std::clamp(p.y, -b, b)};
  }
  const double r = std::sqrt((p.x / a) * (p.x / a) + (p.y / b) * (p.y / b));
  if (r <= 1.0) return p;
  Vec2 q{p.x / r, p.y / r};
  // Guard against landing a hair outside due to rounding.
  while (!contains(q)) q = {q.x * (1.0 - 1e-15), q.y * (1.0 - 1e-15)};
  return q;
}

const SoundSource* Soundscape::find(const std::string& id) const {
  auto it = std::find_if(sources.begin(), sources.end(),
                         [&](const SoundSource& s) { return s.id == id; });
  return it == sources.end() ? nullptr : &*it;
}

SoundSource* Soundscape::find(const std::string& id) {
  return const_cast<SoundSource*>(std::as_const(*this).find(id));
}

Vec2 resolve_position(const SoundSource& src, const ListenerPose& listener) {
  if (src.position_mode == PositionMode::absolute) return src.position;
  const double c = std::cos(listener.yaw);
  const double s = std::sin(listener.yaw);
  return {listener.position.x + c * src.position.x - s * src.position.y,
          listener.position.y + s * src.position.x + c * src.position.y};
}

const char* to_string(RoomShape v) {
  return v == RoomShape::rectangular ? "rectangular" : "round";
}
const char* to_string(PositionMode v) {
  return v == PositionMode::absolute ? "absolute" : "relative";
}
const char* to_string(TimingMode v) {
  return v == TimingMode::after_completes ? "after_completes" : "after_starts";
}

}  // namespace binscape::model
