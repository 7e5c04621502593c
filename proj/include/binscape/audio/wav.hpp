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

#include <cstdint>
#include <span>
#include <vector>

#include "binscape/audio/buffer.hpp"

namespace binscape::audio {

enum class SampleDepth { pcm16, float32 };

/// Decodes a RIFF/WAVE file holding 16-bit PCM, 24-bit PCM or 32-bit IEEE
/// float (plain or WAVE_FORMAT_EXTENSIBLE). Integer samples are scaled by
/// 1/32768 and 1/8388608 respectively.
///
/// Throws UnsupportedCodecError naming the format tag and TruncatedError
/// carrying the byte offset where data ran out.
AudioBuffer decode_wav(std::span<const std::uint8_t> bytes);

/// pcm16 stores round(x * 32767), half away from zero, clamped to int16.
/// float32 is bit-exact through decode_wav.
std::vector<std::uint8_t> encode_wav(const AudioBuffer& buf, SampleDepth depth);

/// Stores pcm16 quantization of one sample.
std::int16_t quantize_pcm16(float x) noexcept;

}  // namespace binscape::audio
