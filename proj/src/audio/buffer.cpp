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


#include "binscape/audio/buffer.hpp"

#include "binscape/error.hpp"

namespace binscape::audio {

void check_buffer(const AudioBuffer& buf) {
  if (buf.sample_rate <= 0) throw ParameterError("sample rate must be positive");
  for (const auto& ch : buf.channels) {
    if (ch.size() != buf.frames()) throw ParameterError("channel lengths differ");
  }
}

AudioBuffer mixdown_mono(const AudioBuffer& buf) {
  if (buf.channel_count() <= 1) return buf;
  AudioBuffer out(1, buf.frames(), buf.sample_rate);
  const double scale = 1.0 / buf.channel_count();
  for (std::size_t i = 0; i < buf.frames(); ++i) {
    double acc = 0.0;
    for (const auto& ch : buf.channels) acc += ch[i];
    out.channels[0][i] = static_cast<float>(acc * scale);
  }
  return out;
}

}  // namespace binscape::audio
