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


#include "binscape/fx/compressor.hpp"

#include <algorithm>
#include <cmath>

namespace binscape::fx {
namespace {

double smoothing(double time_s, int rate) {
  return time_s > 0.0 ? std::exp(-1.0 / (time_s * rate)) : 0.0;
}

}  // namespace

double compressor_gain_db(double level_db, const CompressorParams& p) {
  const double over = level_db - p.threshold_db;
  const double slope = 1.0 / p.ratio - 1.0;
  if (2.0 * over < -p.knee_db) return 0.0;
  if (p.knee_db > 0.0 && 2.0 * std::abs(over) <= p.knee_db) {
    const double x = over + p.knee_db / 2.0;
    return slope * x * x / (2.0 * p.knee_db);
  }
  return slope * over;
}

audio::AudioBuffer compress(const audio::AudioBuffer& buf, const CompressorParams& p) {
  audio::AudioBuffer out = buf;
  const double att = smoothing(p.attack_s, buf.sample_rate);
  const double rel = smoothing(p.release_s, buf.sample_rate);
  double env = 0.0;
  for (std::size_t i = 0; i < buf.frames(); ++i) {
    double peak = 0.0;
    for (const auto& ch : buf.channels) peak = std::max(peak, std::abs(static_cast<double>(ch[i])));
    const double coeff = peak > env ? att : rel;
    env = coeff * env + (1.0 - coeff) * peak;
    if (env <= 0.0) continue;
    const double g_db = compressor_gain_db(20.0 * std::log10(env), p);
    if (g_db == 0.0) continue;
    const double g = std::pow(10.0, g_db / 20.0);
    for (auto& ch : out.channels) ch[i] = static_cast<float>(ch[i] * g);
  }
  return out;
}

}  // namespace binscape::fx
