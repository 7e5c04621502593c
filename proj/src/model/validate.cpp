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


#include "binscape/model/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

namespace binscape::model {
namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void error(std::string path, std::string message) {
    report_.issues.push_back({Severity::error, std::move(path), std::move(message)});
  }
  void warn(std::string path, std::string message) {
    report_.issues.push_back({Severity::warning, std::move(path), std::move(message)});
  }

 private:
  ValidationReport& report_;
};

void check_room(const Room& room, Checker& c) {
  if (!positive(room.width)) c.error("/room/width", "room width must be positive and finite");
  if (!positive(room.depth)) c.error("/room/depth", "room depth must be positive and finite");
  if (!positive(room.height)) c.error("/room/height", "room height must be positive and finite");
  if (room.floorplan && room.floorplan->uri.has_value() == room.floorplan->embedded.has_value()) {
    c.error("/room/floorplan", "floorplan needs exactly one of uri or embedded data");
  }
}

bool room_usable(const Room& room) {
  return positive(room.width) && positive(room.depth) && positive(room.height);
}

bool finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Reports one error per after_completes cycle, found by DFS over sources in
// document order.
void check_cycles(const Soundscape& s, Checker& c) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < s.sources.size(); ++i) index.emplace(s.sources[i].id, i);

  enum class Mark { white, grey, black };
  std::vector<Mark> mark(s.sources.size(), Mark::white);
  std::vector<std::size_t> stack;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    mark[v] = Mark::grey;
    stack.push_back(v);
    for (const auto& t : s.sources[v].timings) {
      if (t.mode != TimingMode::after_completes) continue;
      auto it = index.find(t.after_source);
      if (it == index.end() || it->second == v) continue;
      const std::size_t w = it->second;
      if (mark[w] == Mark::grey) {
        std::string chain;
        auto pos = std::find(stack.begin(), stack.end(), w);
        for (auto p = pos; p != stack.end(); ++p) chain += s.sources[*p].id + " -> ";
        chain += s.sources[w].id;
        c.error("/sources/" + std::to_string(w) + "/timings", "timing cycle: " + chain);
      } else if (mark[w] == Mark::white) {
        visit(w);
      }
    }
    stack.pop_back();
    mark[v] = Mark::black;
  };
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    if (mark[i] == Mark::white) visit(i);
  }
}

}  // namespace

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

ValidationReport validate(const Soundscape& s) {
  ValidationReport report;
  Checker c(report);

  if (s.format_version != kFormatVersion) {
    c.error("/format_version", "unsupported format_version " + std::to_string(s.format_version));
  }
  check_room(s.room, c);
  const bool room_ok = room_usable(s.room);

  const auto& l = s.listener;
  if (!finite(l.position)) {
    c.error("/listener/position", "listener position must be finite");
  } else if (room_ok && !s.room.contains(l.position)) {
    c.error("/listener/position", "listener outside room");
  }
  if (!std::isfinite(l.yaw)) c.error("/listener/yaw", "listener yaw must be finite");
  if (!(l.head_circumference >= 0.3 && l.head_circumference <= 0.8)) {
    c.error("/listener/head_circumference", "head circumference must lie in [0.3, 0.8] m");
  }
  if (!std::isfinite(l.master_gain_db)) {
    c.error("/listener/master_gain_db", "master gain must be finite");
  }

  std::set<std::string> seen;
  std::set<std::string> ids;
  for (const auto& src : s.sources) ids.insert(src.id);

  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    const auto& src = s.sources[i];
    const std::string base = "/sources/" + std::to_string(i);
    if (src.id.empty()) c.error(base + "/id", "source id must not be empty");
    if (!seen.insert(src.id).second) c.error(base + "/id", "duplicate source id '" + src.id + "'");

    const auto& a = src.asset;
    if (a.uri.has_value() == a.embedded.has_value()) {
      c.error(base + "/asset", "asset needs exactly one of uri or embedded data");
    }
    if (a.channels < 1) c.error(base + "/asset/channels", "asset channel count must be >= 1");
    if (a.sample_rate <= 0) c.error(base + "/asset/sample_rate", "asset sample rate must be positive");
    if (!(a.duration >= 0.0) || !std::isfinite(a.duration)) {
      c.error(base + "/asset/duration", "asset duration must be finite and >= 0");
    }

    if (!finite(src.position)) {
      c.error(base + "/position", "source position must be finite");
    } else if (src.position_mode == PositionMode::absolute && room_ok &&
               !s.room.contains(src.position)) {
      c.error(base + "/position", "source outside room");
    }
    if (!std::isfinite(src.elevation)) c.error(base + "/elevation", "elevation must be finite");
    if (!std::isfinite(src.gain_db)) c.error(base + "/gain_db", "gain must be finite");
    if ((src.reach_enabled || src.start_on_enter) && !positive(src.reach_radius)) {
      c.error(base + "/reach_radius", "reach radius must be positive when reach is used");
    }
    if (!(src.reach_fade_duration >= 0.0) || !std::isfinite(src.reach_fade_duration)) {
      c.error(base + "/reach_fade_duration", "reach fade duration must be finite and >= 0");
    }

    // A relative source keeps a constant distance to the listener, so its
    // reach is either always or never satisfied.
    if (src.position_mode == PositionMode::relative && positive(src.reach_radius) &&
        (src.reach_enabled || src.start_on_enter) && finite(src.position) &&
        std::hypot(src.position.x, src.position.y) > src.reach_radius) {
      c.warn(base + "/reach_radius", "source is outside audible reach from every room point");
    }

    for (std::size_t t = 0; t < src.timings.size(); ++t) {
      const auto& tc = src.timings[t];
      const std::string tpath = base + "/timings/" + std::to_string(t) + "/after";
      if (tc.after_source == src.id) {
        c.error(tpath, "timing constraint refers to its own source");
      } else if (!ids.count(tc.after_source)) {
        c.error(tpath, "timing constraint refers to unknown source '" + tc.after_source + "'");
      }
    }
  }

  check_cycles(s, c);
  return report;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : report.issues) {
    issues.push_back({{"severity", i.severity == Severity::error ? "error" : "warning"},
                      {"path", i.path},
                      {"message", i.message}});
  }
  return {{"ok", report.ok()}, {"issues", std::move(issues)}};
}

}  // namespace binscape::model
