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


#include "binscape/model/serialize.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "binscape/error.hpp"
#include "binscape/model/embed.hpp"

namespace binscape::model {
namespace {

using nlohmann::json;

void dump_number(std::string& out, double v) {
  if (!std::isfinite(v)) throw ParameterError("non-finite number in document");
  if (v == 0.0) v = 0.0;  // drop negative zero
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  out.append(buf, res.ptr);
}

void dump(std::string& out, const json& j) {
  switch (j.type()) {
    case json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out.push_back(',');
        first = false;
        out += json(key).dump(-1, ' ', false, json::error_handler_t::strict);
        out.push_back(':');
        dump(out, value);
      }
      out.push_back('}');
      break;
    }
    case json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& value : j) {
        if (!first) out.push_back(',');
        first = false;
        dump(out, value);
      }
      out.push_back(']');
      break;
    }
    case json::value_t::number_float:
      dump_number(out, j.get<double>());
      break;
    default:
      out += j.dump(-1, ' ', false, json::error_handler_t::strict);
  }
}

// Reads one JSON object, remembering which keys were consumed so the rest can
// be kept as pass-through extras.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_.empty() ? "/" : path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  std::string child(const std::string& key) const { return path_ + "/" + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& require(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ParseError(child(key), "required field missing");
    return *it;
  }
  const json* optional(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &require(key);
    if (!v) return *fallback;
    if (!v->is_number()) throw ParseError(child(key), "expected a number");
    return v->get<double>();
  }
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &require(key);
    if (!v) return *fallback;
    if (!v->is_number_integer()) throw ParseError(child(key), "expected an integer");
    return v->get<int>();
  }
  bool boolean(const std::string& key, bool fallback) {
    const json* v = optional(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ParseError(child(key), "expected a boolean");
    return v->get<bool>();
  }
  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &require(key);
    if (!v) return *fallback;
    if (!v->is_string()) throw ParseError(child(key), "expected a string");
    return v->get<std::string>();
  }
  Vec2 vec2(const std::string& key) {
    const json& v = require(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ParseError(child(key), "expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  json extras(std::vector<Issue>& warnings) const {
    json out = json::object();
    for (const auto& [key, value] : j_.items()) {
      if (used_.count(key)) continue;
      warnings.push_back({Severity::warning, child(key), "unknown field '" + key + "' preserved"});
      out[key] = value;
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json vec2_json(Vec2 p) { return json::array({p.x, p.y}); }

void merge_extra(json& target, const json& extra) {
  for (const auto& [key, value] : extra.items()) {
    if (!target.contains(key)) target[key] = value;
  }
}

json embedded_json(const EmbeddedData& e) {
  return {{"data", base64_encode(e.bytes)}, {"media_type", e.media_type}};
}

EmbeddedData read_embedded(ObjectReader& r) {
  const std::string text = r.string("data");
  EmbeddedData e;
  try {
    e.bytes = base64_decode(text);
  } catch (const Error&) {
    throw ParseError(r.child("data"), "invalid base64 payload");
  }
  e.media_type = r.string("media_type", std::string("application/octet-stream"));
  return e;
}

template <typename Enum>
Enum read_enum(ObjectReader& r, const std::string& key, Enum fallback,
               std::initializer_list<std::pair<const char*, Enum>> names) {
  const json* v = r.optional(key);
  if (!v) return fallback;
  if (v->is_string()) {
    for (const auto& [name, value] : names) {
      if (*v == name) return value;
    }
  }
  throw ParseError(r.child(key), "unexpected value " + v->dump());
}

Room read_room(const json& j, std::vector<Issue>& warnings) {
  ObjectReader r(j, "/room");
  Room room;
  room.shape = read_enum(r, "shape", RoomShape::rectangular,
                         {{"rectangular", RoomShape::rectangular}, {"round", RoomShape::round}});
  room.width = r.number("width");
  room.depth = r.number("depth");
  room.height = r.number("height");
  if (const json* fp = r.optional("floorplan")) {
    ObjectReader fr(*fp, r.child("floorplan"));
    ImageRef img;
    if (fr.has("uri")) {
      img.uri = fr.string("uri");
    } else if (fr.has("data")) {
      img.embedded = read_embedded(fr);
    } else {
      throw ParseError(fr.path(), "floorplan needs 'uri' or 'data'");
    }
    img.extra = fr.extras(warnings);
    room.floorplan = std::move(img);
  }
  room.extra = r.extras(warnings);
  return room;
}

ListenerConfig read_listener(const json& j, std::vector<Issue>& warnings) {
  ObjectReader r(j, "/listener");
  ListenerConfig l;
  l.position = r.vec2("position");
  l.yaw = r.number("yaw", 0.0);
  l.head_circumference = r.number("head_circumference", 0.55);
  l.master_gain_db = r.number("master_gain_db", 0.0);
  l.extra = r.extras(warnings);
  return l;
}

AssetRef read_asset(const json& j, const std::string& path, std::vector<Issue>& warnings) {
  ObjectReader r(j, path);
  AssetRef a;
  if (r.has("uri")) {
    a.uri = r.string("uri");
  } else if (r.has("data")) {
    a.embedded = read_embedded(r);
  } else {
    throw ParseError(path, "asset needs 'uri' or 'data'");
  }
  if (r.has("uri") && r.has("data")) throw ParseError(path, "asset has both 'uri' and 'data'");
  a.channels = r.integer("channels", 1);
  a.sample_rate = r.integer("sample_rate", 48000);
  a.duration = r.number("duration", 0.0);
  a.extra = r.extras(warnings);
  return a;
}

SoundSource read_source(const json& j, const std::string& path, std::vector<Issue>& warnings) {
  ObjectReader r(j, path);
  SoundSource s;
  s.id = r.string("id");
  s.name = r.string("name", s.id);
  s.asset = read_asset(r.require("asset"), r.child("asset"), warnings);
  s.position_mode = read_enum(r, "position_mode", PositionMode::absolute,
                              {{"absolute", PositionMode::absolute},
                               {"relative", PositionMode::relative}});
  s.position = r.vec2("position");
  s.elevation = r.number("elevation", 0.0);
  s.gain_db = r.number("gain_db", 0.0);
  s.loop = r.boolean("loop", false);
  s.reach_enabled = r.boolean("reach_enabled", false);
  s.reach_radius = r.number("reach_radius", 1.0);
  s.reach_fade_duration = r.number("reach_fade_duration", 0.0);
  s.start_on_enter = r.boolean("start_on_enter", false);
  s.hidden = r.boolean("hidden", false);
  s.spatialized = r.boolean("spatialized", true);
  if (const json* t = r.optional("timings")) {
    if (!t->is_array()) throw ParseError(r.child("timings"), "expected an array");
    for (std::size_t i = 0; i < t->size(); ++i) {
      ObjectReader tr((*t)[i], r.child("timings") + "/" + std::to_string(i));
      TimingConstraint tc;
      tc.after_source = tr.string("after");
      tc.mode = read_enum(tr, "mode", TimingMode::after_completes,
                          {{"after_completes", TimingMode::after_completes},
                           {"after_starts", TimingMode::after_starts}});
      tc.extra = tr.extras(warnings);
      s.timings.push_back(std::move(tc));
    }
  }
  s.extra = r.extras(warnings);
  return s;
}

}  // namespace

std::string canonical_dump(const json& doc) {
  std::string out;
  dump(out, doc);
  return out;
}

double canonical_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  double back = 0.0;
  std::from_chars(buf, res.ptr, back);
  return back == 0.0 ? 0.0 : back;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

json to_json(const Soundscape& s) {
  json room = {{"shape", to_string(s.room.shape)},
               {"width", s.room.width},
               {"depth", s.room.depth},
               {"height", s.room.height}};
  if (s.room.floorplan) {
    const auto& fp = *s.room.floorplan;
    json f = fp.uri ? json{{"uri", *fp.uri}} : embedded_json(*fp.embedded);
    merge_extra(f, fp.extra);
    room["floorplan"] = std::move(f);
  }
  merge_extra(room, s.room.extra);

  json listener = {{"position", vec2_json(s.listener.position)},
                   {"yaw", s.listener.yaw},
                   {"head_circumference", s.listener.head_circumference},
                   {"master_gain_db", s.listener.master_gain_db}};
  merge_extra(listener, s.listener.extra);

  json sources = json::array();
  for (const auto& src : s.sources) {
    json asset = src.asset.uri ? json{{"uri", *src.asset.uri}}
                               : (src.asset.embedded ? embedded_json(*src.asset.embedded)
                                                     : json::object());
    asset["channels"] = src.asset.channels;
    asset["sample_rate"] = src.asset.sample_rate;
    asset["duration"] = src.asset.duration;
    merge_extra(asset, src.asset.extra);

    json timings = json::array();
    for (const auto& t : src.timings) {
      json tj = {{"after", t.after_source}, {"mode", to_string(t.mode)}};
      merge_extra(tj, t.extra);
      timings.push_back(std::move(tj));
    }
    json j = {{"id", src.id},
              {"name", src.name},
              {"asset", std::move(asset)},
              {"position_mode", to_string(src.position_mode)},
              {"position", vec2_json(src.position)},
              {"elevation", src.elevation},
              {"gain_db", src.gain_db},
              {"loop", src.loop},
              {"reach_enabled", src.reach_enabled},
              {"reach_radius", src.reach_radius},
              {"reach_fade_duration", src.reach_fade_duration},
              {"start_on_enter", src.start_on_enter},
              {"hidden", src.hidden},
              {"spatialized", src.spatialized},
              {"timings", std::move(timings)}};
    merge_extra(j, src.extra);
    sources.push_back(std::move(j));
  }

  json doc = {{"format_version", s.format_version},
              {"title", s.title},
              {"description", s.description},
              {"tags", s.tags},
              {"room", std::move(room)},
              {"listener", std::move(listener)},
              {"sources", std::move(sources)}};
  merge_extra(doc, s.extra);
  return doc;
}

Deserialized from_json(const json& doc) {
  Deserialized out;
  auto& warnings = out.warnings;
  ObjectReader r(doc, "");
  Soundscape& s = out.soundscape;
  s.format_version = r.integer("format_version", kFormatVersion);
  s.title = r.string("title", std::string());
  s.description = r.string("description", std::string());
  if (const json* tags = r.optional("tags")) {
    if (!tags->is_array()) throw ParseError("/tags", "expected an array of strings");
    for (std::size_t i = 0; i < tags->size(); ++i) {
      if (!(*tags)[i].is_string()) throw ParseError("/tags/" + std::to_string(i), "expected a string");
      s.tags.push_back((*tags)[i].get<std::string>());
    }
  }
  s.room = read_room(r.require("room"), warnings);
  s.listener = read_listener(r.require("listener"), warnings);
  const json& sources = r.require("sources");
  if (!sources.is_array()) throw ParseError("/sources", "expected an array");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    s.sources.push_back(read_source(sources[i], "/sources/" + std::to_string(i), warnings));
  }
  s.extra = r.extras(warnings);
  return out;
}

std::string serialize(const Soundscape& s) {
  const auto report = validate(s);
  for (const auto& issue : report.issues) {
    if (issue.severity == Severity::error) {
      throw ParameterError("soundscape does not validate: " + issue.path + ": " + issue.message);
    }
  }
  return canonical_dump(to_json(s));
}

Deserialized deserialize(std::string_view text) { return from_json(parse_json(text)); }

}  // namespace binscape::model
