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

namespace binscape::fx {

/// Feed-forward peak compressor. Attack and release are the time constants
/// for the detector to cover 1 - 1/e of a step.
struct CompressorParams {
  double threshold_db = -24.0;
  double ratio = 12.0;
  double knee_db = 30.0;
  double attack_s = 0.003;
  double release_s = 0.25;
};

/// Static curve: gain (dB, <= 0) applied to a detector level of `level_db`.
/// Soft knee of width knee_db centred on the threshold.
double compressor_gain_db(double level_db, const CompressorParams& p);

/// Stereo-linked: one detector follows the per-frame peak over all channels.
audio::AudioBuffer compress(const audio::AudioBuffer& buf, const CompressorParams& p);

}  // namespace binscape::fx
