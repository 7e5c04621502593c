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

#include "binscape/audio/buffer.hpp"

namespace binscape::audio {

/// Polyphase windowed-sinc resampler.
///
/// Each output sample is a 64-tap dot product with a Kaiser-windowed
/// (beta = 8.6) sinc evaluated at the exact fractional input position. The
/// phase table holds one row per distinct fractional position of the reduced
/// rate ratio (up to kMaxPhases rows; beyond that the nearest row is used).
/// Every row is normalized to unit sum so DC passes unchanged.
///
/// The cutoff sits at 0.91 x the Nyquist frequency of the lower of the two
/// rates. With 64 taps the Kaiser transition band is about 0.087 of that
/// rate wide, so the passband runs to roughly 0.41 fs_low with ripple well
/// under 0.01 dB, and components above fs_low/2 are rejected by ~80 dB.
///
/// Output length is ceil(frames * target / source). A same-rate call
/// returns the input unchanged.
AudioBuffer resample(const AudioBuffer& buf, int target_rate);

inline constexpr int kResampleTaps = 64;
inline constexpr double kResampleBeta = 8.6;
inline constexpr int kMaxPhases = 4096;

}  // namespace binscape::audio
