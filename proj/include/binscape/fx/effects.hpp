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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/audio/buffer.hpp"
#include "binscape/error.hpp"
#include "binscape/fx/biquad.hpp"
#include "binscape/fx/compressor.hpp"

namespace binscape::fx {

enum class EffectKind {
  lowpass, highpass, bandpass, lowshelf, highshelf, peaking, notch,
  compressor, convolver, gain, fade_in, fade_out
};

/// Longest accepted convolver impulse.
inline constexpr double kMaxImpulseSeconds = 10.0;

/// One rack entry. Only the fields relevant to `kind` are read.
struct EffectSpec {
  EffectKind kind = EffectKind::gain;
  double fc = 1000.0;
  double q = 0.7071067811865476;
  double gain_db = 0.0;
  CompressorParams compressor;
  std::optional<audio::AudioBuffer> impulse;
  double duration_s = 0.0;
};

/// Raised by render_chain; `index` is the position of the failing effect.
class EffectError : public Error {
 public:
  EffectError(std::size_t index, const std::string& message)
      : Error("effect " + std::to_string(index) + ": " + message), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Throws ParameterError for invalid parameters and ResourceError for
/// impulses longer than kMaxImpulseSeconds.
audio::AudioBuffer process_effect(const audio::AudioBuffer& buf, const EffectSpec& spec);

/// Applies `specs` left to right.
audio::AudioBuffer render_chain(const audio::AudioBuffer& buf, const std::vector<EffectSpec>& specs);

/// Loads a convolver impulse named in an effects document.
using ImpulseLoader = std::function<audio::AudioBuffer(const std::string& ref)>;

/// Parses the effects document: a JSON array of {"kind": ..., params}.
std::vector<EffectSpec> parse_effects(const nlohmann::json& doc, const ImpulseLoader& load_impulse);

const char* to_string(EffectKind kind);

}  // namespace binscape::fx
