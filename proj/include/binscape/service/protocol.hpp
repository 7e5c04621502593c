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
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "binscape/engine/engine.hpp"

namespace binscape::service {

inline constexpr std::uint32_t kFrameMagic = 0x50534F4E;
/// Frames per wire frame: 20 ms at 48 kHz.
inline constexpr std::uint16_t kWireFrames = 960;
/// magic, sequence, sample index, frame count.
inline constexpr std::size_t kFrameHeaderBytes = 4 + 4 + 8 + 2;

/// One binary stream frame; `samples` is interleaved L/R.
struct WireFrame {
  std::uint32_t sequence = 0;
  std::uint64_t sample_index = 0;
  std::vector<float> samples;
  std::size_t frame_count() const noexcept { return samples.size() / 2; }
  bool operator==(const WireFrame&) const = default;
};

/// Little-endian encoding regardless of host order.
std::vector<std::uint8_t> encode_frame(const WireFrame& f);
/// Throws ParseError on a bad magic and TruncatedError on short input.
WireFrame decode_frame(std::span<const std::uint8_t> bytes);

/// Client text messages. Record start/stop map to engine messages; the
/// session turns a finished recording into a stored WAV.
using ClientMessage = engine::ControlMessage;

/// Parses {"type": "pose"|"transport"|"set"|"record", ...}. Throws
/// ParseError with a JSON pointer to the offending field.
ClientMessage parse_client_message(const std::string& text);

/// Re-chunks the engine's 128-frame blocks into wire frames.
class Framer {
 public:
  explicit Framer(engine::Engine& eng, std::uint16_t frame_count = kWireFrames);
  WireFrame next();

 private:
  engine::Engine& engine_;
  std::uint16_t frame_count_;
  std::uint32_t sequence_ = 0;
  std::uint64_t emitted_ = 0;
  std::deque<float> pending_;  // interleaved
};

}  // namespace binscape::service
