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


// Shared fixtures and independent oracles for the test binaries.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "binscape/audio/buffer.hpp"
#include "binscape/audio/wav.hpp"
#include "binscape/engine/engine.hpp"
#include "binscape/model/serialize.hpp"
#include "binscape/model/soundscape.hpp"

namespace testsupport {

using namespace binscape;

/// O(N*M) convolution in long double.
inline std::vector<double> direct_convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  std::vector<long double> acc(x.size() + h.size() - 1, 0.0L);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) acc[i + k] += static_cast<long double>(x[i]) * h[k];
  }
  return {acc.begin(), acc.end()};
}

inline std::vector<float> noise(std::size_t n, std::uint64_t seed, float amp = 0.5f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-amp, amp);
  std::vector<float> v(n);
  for (auto& s : v) s = d(rng);
  return v;
}

inline audio::AudioBuffer mono(std::vector<float> samples, int rate = 48000) {
  audio::AudioBuffer b;
  b.sample_rate = rate;
  b.channels.push_back(std::move(samples));
  return b;
}

inline model::SoundSource source(const std::string& id, model::Vec2 pos = {0, 0}) {
  model::SoundSource s;
  s.id = id;
  s.name = id;
  s.asset.uri = "assets/" + id + ".wav";
  s.position = pos;
  return s;
}

inline model::Soundscape scene(std::vector<model::SoundSource> sources, double width = 20,
                               double depth = 20) {
  model::Soundscape s;
  s.title = "test";
  s.room.width = width;
  s.room.depth = depth;
  s.listener.position = {0, 0};
  s.sources = std::move(sources);
  return s;
}

inline double rms(std::span<const float> v, std::size_t from = 0, std::size_t to = SIZE_MAX) {
  to = std::min(to, v.size());
  if (to <= from) return 0.0;
  double acc = 0.0;
  for (std::size_t i = from; i < to; ++i) acc += double(v[i]) * v[i];
  return std::sqrt(acc / double(to - from));
}

/// Random valid soundscape whose numbers already sit on the canonical grid,
/// exercising every field including extras and embedded payloads.
inline model::Soundscape random_soundscape(std::mt19937_64& rng) {
  auto uni = [&](double a, double b) {
    return model::canonical_number(std::uniform_real_distribution<double>(a, b)(rng));
  };
  auto coin = [&](double p = 0.5) { return std::bernoulli_distribution(p)(rng); };
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  auto text = [&](int max_len) {
    static const std::vector<std::string> pieces = {"a", "Z", "7", " ", "_", "é", "ß", "音", "\"", "\\", "/", "\n"};
    std::string s;
    const int n = pick(max_len + 1);
    for (int i = 0; i < n; ++i) s += pieces[static_cast<std::size_t>(pick(int(pieces.size())))];
    return s;
  };
  auto extra = [&]() {
    nlohmann::json e = nlohmann::json::object();
    if (coin(0.3)) e["x_note"] = text(6);
    if (coin(0.2)) e["x_weight"] = uni(-5, 5);
    if (coin(0.1)) e["x_list"] = {1, 2, 3};
    return e;
  };

  model::Soundscape s;
  s.title = text(12);
  s.description = text(30);
  for (int i = pick(4); i > 0; --i) s.tags.push_back(text(5));
  s.room.shape = coin() ? model::RoomShape::rectangular : model::RoomShape::round;
  s.room.width = uni(2, 40);
  s.room.depth = uni(2, 40);
  s.room.height = uni(2, 8);
  if (coin(0.3)) {
    model::ImageRef img;
    if (coin()) {
      img.uri = "plans/" + std::to_string(pick(100)) + ".png";
    } else {
      model::EmbeddedData e;
      for (int i = pick(40); i > 0; --i) e.bytes.push_back(static_cast<std::uint8_t>(pick(256)));
      e.media_type = "image/png";
      img.embedded = e;
    }
    img.extra = extra();
    s.room.floorplan = img;
  }
  s.room.extra = extra();

  // Points inside both the rectangle and the inscribed ellipse.
  auto inside = [&]() {
    const double r = uni(0, 0.65);
    const double a = uni(0, 6.283);
    return model::Vec2{model::canonical_number(r * std::cos(a) * s.room.width / 2),
                       model::canonical_number(r * std::sin(a) * s.room.depth / 2)};
  };
  s.listener.position = inside();
  s.listener.yaw = uni(-3.14, 3.14);
  s.listener.head_circumference = uni(0.3, 0.8);
  s.listener.master_gain_db = uni(-30, 6);
  s.listener.extra = extra();

  const int count = pick(7);
  for (int i = 0; i < count; ++i) {
    model::SoundSource src;
    src.id = "s" + std::to_string(i) + (coin(0.3) ? "-" + text(3) : "");
    src.name = text(8);
    if (coin(0.7)) {
      src.asset.uri = "/assets/" + std::to_string(pick(1000));
    } else {
      model::EmbeddedData e;
      for (int k = pick(64); k > 0; --k) e.bytes.push_back(static_cast<std::uint8_t>(pick(256)));
      e.media_type = "audio/wav";
      src.asset.embedded = e;
    }
    src.asset.channels = 1 + pick(2);
    src.asset.sample_rate = coin() ? 48000 : 44100;
    src.asset.duration = uni(0, 60);
    src.asset.extra = extra();
    src.position_mode = coin(0.8) ? model::PositionMode::absolute : model::PositionMode::relative;
    src.position = inside();
    src.elevation = uni(-1.5, 1.5);
    src.gain_db = uni(-40, 12);
    src.loop = coin();
    src.reach_radius = uni(0.5, 10);
    if (src.position_mode == model::PositionMode::relative) {
      const double r = std::hypot(src.position.x, src.position.y);
      src.reach_radius = model::canonical_number(r + uni(0.1, 3));
    }
    src.reach_enabled = coin();
    src.reach_fade_duration = uni(0, 5);
    src.start_on_enter = coin(0.2);
    src.hidden = coin(0.2);
    src.spatialized = coin(0.8);
    // Edges only point to earlier sources, so the graph is acyclic.
    for (int k = 0; k < i; ++k) {
      if (coin(0.25)) {
        model::TimingConstraint t;
        t.after_source = s.sources[static_cast<std::size_t>(k)].id;
        t.mode = coin() ? model::TimingMode::after_completes : model::TimingMode::after_starts;
        t.extra = extra();
        src.timings.push_back(t);
      }
    }
    src.extra = extra();
    s.sources.push_back(std::move(src));
  }
  s.extra = extra();
  return s;
}

}  // namespace testsupport
