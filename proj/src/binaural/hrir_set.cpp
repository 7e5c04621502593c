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


#include "binscape/binaural/hrir_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numbers>

#include <nlohmann/json.hpp>

#include "binscape/audio/resample.hpp"
#include "binscape/audio/wav.hpp"
#include "binscape/error.hpp"

namespace binscape::binaural {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap_azimuth(double az) {
  double a = std::fmod(az, 360.0);
  if (a < 0.0) a += 360.0;
  return a >= 360.0 ? 0.0 : a;
}

// Brown & Duda head-shadow filter, bilinear-transformed, for an ear whose
// axis makes `theta_deg` with the source direction.
std::vector<float> head_shadow_ir(double theta_deg, double radius, int rate, std::size_t length) {
  constexpr double alpha_min = 0.1;
  constexpr double theta_min = 150.0;
  const double alpha = (1.0 + alpha_min / 2.0) +
                       (1.0 - alpha_min / 2.0) * std::cos(theta_deg / theta_min * std::numbers::pi);
  const double w0 = 343.0 / radius;
  const double k = 2.0 * rate;
  const double a0 = k + 2.0 * w0;
  const double b0 = (alpha * k + 2.0 * w0) / a0;
  const double b1 = (2.0 * w0 - alpha * k) / a0;
  const double a1 = (2.0 * w0 - k) / a0;
  std::vector<float> ir(length);
  double x1 = 0.0, y1 = 0.0;
  for (std::size_t n = 0; n < length; ++n) {
    const double x = n == 0 ? 1.0 : 0.0;
    const double y = b0 * x + b1 * x1 - a1 * y1;
    ir[n] = static_cast<float>(y);
    x1 = x;
    y1 = y;
  }
  return ir;
}

std::string format_angle(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !out.write(data.data(), static_cast<std::streamsize>(data.size()))) {
    throw IoError("cannot write " + p.string());
  }
}

}  // namespace

void check_hrir_set(const HrirSet& set) {
  if (set.grid.empty()) throw ParameterError("HRIR set has an empty grid");
  if (set.sample_rate <= 0) throw ParameterError("HRIR set sample rate must be positive");
  if (set.length == 0) throw ParameterError("HRIR length must be positive");
  if (set.left.size() != set.grid.size() || set.right.size() != set.grid.size()) {
    throw ParameterError("HRIR set needs one left and one right response per direction");
  }
  for (std::size_t i = 0; i < set.grid.size(); ++i) {
    const auto& d = set.grid[i];
    if (!(d.azimuth_deg >= 0.0 && d.azimuth_deg < 360.0)) {
      throw ParameterError("azimuth out of [0, 360) at direction " + std::to_string(i));
    }
    if (!(d.elevation_deg >= -90.0 && d.elevation_deg <= 90.0)) {
      throw ParameterError("elevation out of [-90, 90] at direction " + std::to_string(i));
    }
    if (set.left[i].size() != set.length || set.right[i].size() != set.length) {
      throw ParameterError("response length differs at direction " + std::to_string(i));
    }
  }
}

std::size_t select_hrir(const HrirSet& set, double azimuth_deg, double elevation_deg) {
  const double qa = wrap_azimuth(azimuth_deg);
  const double qe = elevation_deg * kDeg;
  const double sq = std::sin(qe);
  const double cq = std::cos(qe);
  std::size_t best = 0;
  double best_cos = -2.0;
  for (std::size_t i = 0; i < set.grid.size(); ++i) {
    const auto& d = set.grid[i];
    const double e = d.elevation_deg * kDeg;
    const double c = sq * std::sin(e) + cq * std::cos(e) * std::cos((qa - d.azimuth_deg) * kDeg);
    if (c > best_cos) {
      best_cos = c;
      best = i;
    }
  }
  return best;
}

HrirSet synthetic_hrir_set(int sample_rate, std::size_t length, double head_circumference) {
  HrirSet set;
  set.name = "synthetic-spherical-head";
  set.sample_rate = sample_rate;
  set.length = length;
  const double radius = head_circumference / (2.0 * std::numbers::pi);
  for (double el : {-30.0, 0.0, 30.0}) {
    const std::size_t row = set.grid.size();
    for (int a = 0; a < 360; a += 5) {
      set.grid.push_back({static_cast<double>(a), el});
      // Angle between the left ear axis (+90 az, 0 el) and the source.
      const double cos_left = std::sin(a * kDeg) * std::cos(el * kDeg);
      const double theta = std::acos(std::clamp(cos_left, -1.0, 1.0)) / kDeg;
      set.left.push_back(head_shadow_ir(theta, radius, sample_rate, length));
    }
    for (int a = 0; a < 360; a += 5) {
      const int mirror = (360 - a) % 360;
      set.right.push_back(set.left[row + static_cast<std::size_t>(mirror / 5)]);
    }
  }
  return set;
}

HrirSet identity_hrir_set(std::vector<Direction> grid, int sample_rate, std::size_t length) {
  HrirSet set;
  set.name = "identity";
  set.sample_rate = sample_rate;
  set.length = length;
  std::vector<float> delta(length, 0.0f);
  delta[0] = 1.0f;
  set.left.assign(grid.size(), delta);
  set.right.assign(grid.size(), delta);
  set.grid = std::move(grid);
  return set;
}

HrirSet resample_hrir_set(const HrirSet& set, int target_rate) {
  if (set.sample_rate == target_rate) return set;
  HrirSet out = set;
  out.sample_rate = target_rate;
  for (std::size_t i = 0; i < set.size(); ++i) {
    audio::AudioBuffer pair(2, set.length, set.sample_rate);
    pair.channels[0] = set.left[i];
    pair.channels[1] = set.right[i];
    auto r = audio::resample(pair, target_rate);
    out.left[i] = std::move(r.channels[0]);
    out.right[i] = std::move(r.channels[1]);
    out.length = out.left[i].size();
  }
  return out;
}

std::string hrir_filename(const Direction& d) {
  return "az" + format_angle(d.azimuth_deg) + "_el" + format_angle(d.elevation_deg) + ".wav";
}

HrirSet load_hrir_set(const std::filesystem::path& dir) {
  const auto bytes = read_file(dir / "index.json");
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed " + (dir / "index.json").string() + ": " + e.what());
  }
  HrirSet set;
  try {
    set.name = index.value("name", dir.filename().string());
    set.sample_rate = index.at("sample_rate").get<int>();
    set.length = index.at("length").get<std::size_t>();
    for (const auto& d : index.at("directions")) {
      Direction dir_entry{d.at("azimuth").get<double>(), d.at("elevation").get<double>()};
      const std::string file = d.value("file", hrir_filename(dir_entry));
      const auto wav = audio::decode_wav(read_file(dir / file));
      if (wav.channel_count() != 2) throw IoError(file + " is not a stereo WAV");
      if (wav.sample_rate != set.sample_rate) throw IoError(file + " has a mismatching sample rate");
      set.grid.push_back(dir_entry);
      set.left.push_back(wav.channels[0]);
      set.right.push_back(wav.channels[1]);
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad HRIR index " + (dir / "index.json").string() + ": " + e.what());
  }
  check_hrir_set(set);
  return set;
}

void save_hrir_set(const HrirSet& set, const std::filesystem::path& dir) {
  check_hrir_set(set);
  std::filesystem::create_directories(dir);
  nlohmann::json directions = nlohmann::json::array();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const std::string file = hrir_filename(set.grid[i]);
    audio::AudioBuffer pair(2, set.length, set.sample_rate);
    pair.channels[0] = set.left[i];
    pair.channels[1] = set.right[i];
    const auto wav = audio::encode_wav(pair, audio::SampleDepth::float32);
    write_file(dir / file, std::string(wav.begin(), wav.end()));
    directions.push_back({{"azimuth", set.grid[i].azimuth_deg},
                          {"elevation", set.grid[i].elevation_deg},
                          {"file", file}});
  }
  nlohmann::json index = {{"name", set.name},
                          {"sample_rate", set.sample_rate},
                          {"length", set.length},
                          {"directions", std::move(directions)}};
  write_file(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace binscape::binaural
