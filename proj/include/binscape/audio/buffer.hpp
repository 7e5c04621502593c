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
#include <vector>

namespace binscape::audio {

/// Engine-internal processing rate. Assets are resampled to it at load.
inline constexpr int kEngineRate = 48000;

/// Planar float PCM. Samples are nominally in [-1, 1].
struct AudioBuffer {
  int sample_rate = kEngineRate;
  std::vector<std::vector<float>> channels;

  AudioBuffer() = default;
  AudioBuffer(int channel_count, std::size_t frames, int rate)
      : sample_rate(rate),
        channels(static_cast<std::size_t>(channel_count),
                 std::vector<float>(frames, 0.0f)) {}

  int channel_count() const noexcept { return static_cast<int>(channels.size()); }
  std::size_t frames() const noexcept {
    return channels.empty() ? 0 : channels.front().size();
  }
  double duration() const noexcept {
    return sample_rate > 0 ? static_cast<double>(frames()) / sample_rate : 0.0;
  }

  bool operator==(const AudioBuffer&) const = default;
};

/// Throws ParameterError when channel lengths differ or the rate is not positive.
void check_buffer(const AudioBuffer& buf);

/// Equal-weight channel average.
AudioBuffer mixdown_mono(const AudioBuffer& buf);

}  // namespace binscape::audio
