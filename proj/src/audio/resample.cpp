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


#include "binscape/audio/resample.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "binscape/error.hpp"

namespace binscape::audio {
namespace {

constexpr double kCutoffFraction = 0.91;

double kaiser(double x, double half_width) {
  // x in [-half_width, half_width]
  const double r = x / half_width;
  if (r <= -1.0 || r >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, kResampleBeta * std::sqrt(1.0 - r * r)) /
         std::cyl_bessel_i(0.0, kResampleBeta);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Row p holds the taps for fractional position p / phases. Tap k multiplies
// input sample floor(t) - (kResampleTaps/2 - 1) + k.
std::vector<std::vector<double>> build_table(int phases, double cutoff) {
  constexpr int half = kResampleTaps / 2;
  std::vector<std::vector<double>> table(static_cast<std::size_t>(phases),
                                         std::vector<double>(kResampleTaps));
  for (int p = 0; p < phases; ++p) {
    const double frac = static_cast<double>(p) / phases;
    auto& row = table[static_cast<std::size_t>(p)];
    for (int k = 0; k < kResampleTaps; ++k) {
      const double x = (k - (half - 1)) - frac;  // input index minus output time
      row[static_cast<std::size_t>(k)] = cutoff * sinc(cutoff * x) * kaiser(x, half);
    }
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (double& v : row) v /= sum;
  }
  return table;
}

}  // namespace

AudioBuffer resample(const AudioBuffer& buf, int target_rate) {
  if (target_rate <= 0) throw ParameterError("target rate must be positive");
  check_buffer(buf);
  if (target_rate == buf.sample_rate) return buf;

  const long long g = std::gcd(target_rate, buf.sample_rate);
  const long long up = target_rate / g;
  const long long down = buf.sample_rate / g;
  const int phases = static_cast<int>(std::min<long long>(up, kMaxPhases));
  // Normalized to the input rate: cutoff in cycles per input sample times two.
  const double cutoff = kCutoffFraction * std::min(1.0, static_cast<double>(up) / down);
  const auto table = build_table(phases, cutoff);

  const auto in_frames = static_cast<long long>(buf.frames());
  const long long out_frames = (in_frames * up + down - 1) / down;
  AudioBuffer out(buf.channel_count(), static_cast<std::size_t>(out_frames), target_rate);
  constexpr int half = kResampleTaps / 2;

  for (long long k = 0; k < out_frames; ++k) {
    const long long num = k * down;  // output time in input samples = num / up
    const long long base = num / up;
    const long long rem = num % up;
    const auto phase = static_cast<std::size_t>(
        phases == up ? rem : std::llround(static_cast<double>(rem) * phases / up) % phases);
    const long long shift = (phases != up && rem != 0 && phase == 0) ? 1 : 0;
    const auto& row = table[phase];
    const long long first = base + shift - (half - 1);
    for (int c = 0; c < buf.channel_count(); ++c) {
      const auto& in = buf.channels[static_cast<std::size_t>(c)];
      double acc = 0.0;
      for (int t = 0; t < kResampleTaps; ++t) {
        const long long idx = first + t;
        if (idx < 0 || idx >= in_frames) continue;
        acc += row[static_cast<std::size_t>(t)] * in[static_cast<std::size_t>(idx)];
      }
      out.channels[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] =
          static_cast<float>(acc);
    }
  }
  return out;
}

}  // namespace binscape::audio
