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


#include "binscape/fx/effects.hpp"

#include <algorithm>
#include <cmath>

#include "binscape/audio/resample.hpp"
#include "binscape/fx/convolve.hpp"

namespace binscape::fx {
namespace {

struct KindName {
  EffectKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {EffectKind::lowpass, "lowpass"},       {EffectKind::highpass, "highpass"},
    {EffectKind::bandpass, "bandpass"},     {EffectKind::lowshelf, "lowshelf"},
    {EffectKind::highshelf, "highshelf"},   {EffectKind::peaking, "peaking"},
    {EffectKind::notch, "notch"},           {EffectKind::compressor, "compressor"},
    {EffectKind::convolver, "convolver"},   {EffectKind::gain, "gain"},
    {EffectKind::fade_in, "fade_in"},       {EffectKind::fade_out, "fade_out"},
};

std::optional<FilterKind> filter_kind(EffectKind k) {
  switch (k) {
    case EffectKind::lowpass: return FilterKind::lowpass;
    case EffectKind::highpass: return FilterKind::highpass;
    case EffectKind::bandpass: return FilterKind::bandpass;
    case EffectKind::lowshelf: return FilterKind::lowshelf;
    case EffectKind::highshelf: return FilterKind::highshelf;
    case EffectKind::peaking: return FilterKind::peaking;
    case EffectKind::notch: return FilterKind::notch;
    default: return std::nullopt;
  }
}

audio::AudioBuffer apply_biquad(const audio::AudioBuffer& buf, const BiquadCoeffs& c) {
  audio::AudioBuffer out = buf;
  for (auto& ch : out.channels) {
    Biquad f{c};
    f.process(ch);
  }
  return out;
}

audio::AudioBuffer apply_convolver(const audio::AudioBuffer& buf, const audio::AudioBuffer& raw) {
  audio::check_buffer(raw);
  if (raw.duration() > kMaxImpulseSeconds) {
    throw ResourceError("impulse of " + std::to_string(raw.duration()) + " s exceeds " +
                        std::to_string(kMaxImpulseSeconds) + " s");
  }
  const audio::AudioBuffer ir =
      raw.sample_rate == buf.sample_rate ? raw : audio::resample(raw, buf.sample_rate);
  const int in_ch = buf.channel_count();
  const int ir_ch = ir.channel_count();
  if (in_ch == 0 || ir_ch == 0) throw ParameterError("convolver needs non-empty channels");
  if (in_ch != ir_ch && in_ch != 1 && ir_ch != 1) {
    throw ParameterError("impulse has " + std::to_string(ir_ch) + " channels, input has " +
                         std::to_string(in_ch));
  }
  const int out_ch = std::max(in_ch, ir_ch);
  if (buf.frames() == 0 || ir.frames() == 0) return audio::AudioBuffer(out_ch, 0, buf.sample_rate);

  audio::AudioBuffer out(out_ch, buf.frames() + ir.frames() - 1, buf.sample_rate);
  for (int c = 0; c < out_ch; ++c) {
    const auto& x = buf.channels[static_cast<std::size_t>(in_ch == 1 ? 0 : c)];
    const auto& h = ir.channels[static_cast<std::size_t>(ir_ch == 1 ? 0 : c)];
    const std::vector<double> xd(x.begin(), x.end());
    const std::vector<double> hd(h.begin(), h.end());
    const auto y = fft_convolve(xd, hd);
    auto& dst = out.channels[static_cast<std::size_t>(c)];
    std::transform(y.begin(), y.end(), dst.begin(), [](double v) { return static_cast<float>(v); });
  }
  return out;
}

audio::AudioBuffer apply_fade(const audio::AudioBuffer& buf, double duration_s, bool fade_in) {
  if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
    throw ParameterError("fade duration must be finite and >= 0");
  }
  audio::AudioBuffer out = buf;
  const auto ramp = static_cast<std::size_t>(std::llround(duration_s * buf.sample_rate));
  const std::size_t n = buf.frames();
  const std::size_t len = std::min(ramp, n);
  for (auto& ch : out.channels) {
    for (std::size_t k = 0; k < len; ++k) {
      const double g = static_cast<double>(k) / static_cast<double>(ramp);
      const std::size_t i = fade_in ? k : n - 1 - k;
      ch[i] = static_cast<float>(ch[i] * g);
    }
  }
  return out;
}

void check_compressor(const CompressorParams& p) {
  if (!(p.ratio >= 1.0) || !std::isfinite(p.ratio)) throw ParameterError("ratio must be >= 1");
  if (!(p.attack_s >= 0.0) || !(p.release_s >= 0.0)) {
    throw ParameterError("attack and release must be >= 0");
  }
  if (!(p.knee_db >= 0.0)) throw ParameterError("knee must be >= 0 dB");
  if (!std::isfinite(p.threshold_db)) throw ParameterError("threshold must be finite");
}

}  // namespace

const char* to_string(EffectKind kind) {
  for (const auto& k : kKindNames) {
    if (k.kind == kind) return k.name;
  }
  return "unknown";
}

audio::AudioBuffer process_effect(const audio::AudioBuffer& buf, const EffectSpec& spec) {
  audio::check_buffer(buf);
  if (auto fk = filter_kind(spec.kind)) {
    return apply_biquad(buf, biquad_coeffs(*fk, spec.fc, spec.q, spec.gain_db, buf.sample_rate));
  }
  switch (spec.kind) {
    case EffectKind::compressor:
      check_compressor(spec.compressor);
      return compress(buf, spec.compressor);
    case EffectKind::convolver:
      if (!spec.impulse) throw ParameterError("convolver needs an impulse");
      return apply_convolver(buf, *spec.impulse);
    case EffectKind::gain: {
      if (!std::isfinite(spec.gain_db)) throw ParameterError("gain must be finite");
      const double g = std::pow(10.0, spec.gain_db / 20.0);
      audio::AudioBuffer out = buf;
      for (auto& ch : out.channels) {
        for (float& s : ch) s = static_cast<float>(s * g);
      }
      return out;
    }
    case EffectKind::fade_in:
      return apply_fade(buf, spec.duration_s, true);
    case EffectKind::fade_out:
      return apply_fade(buf, spec.duration_s, false);
    default:
      throw ParameterError("unknown effect kind");
  }
}

audio::AudioBuffer render_chain(const audio::AudioBuffer& buf,
                                const std::vector<EffectSpec>& specs) {
  audio::AudioBuffer cur = buf;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      cur = process_effect(cur, specs[i]);
    } catch (const EffectError&) {
      throw;
    } catch (const Error& e) {
      throw EffectError(i, std::string(to_string(specs[i].kind)) + ": " + e.what());
    }
  }
  return cur;
}

std::vector<EffectSpec> parse_effects(const nlohmann::json& doc, const ImpulseLoader& load_impulse) {
  if (!doc.is_array()) throw ParseError("", "effects document must be an array");
  std::vector<EffectSpec> specs;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    const std::string path = "/" + std::to_string(i);
    if (!e.is_object()) throw ParseError(path, "expected an object");
    if (!e.contains("kind") || !e["kind"].is_string()) throw ParseError(path + "/kind", "missing kind");
    EffectSpec spec;
    const auto kind = e["kind"].get<std::string>();
    auto it = std::find_if(std::begin(kKindNames), std::end(kKindNames),
                           [&](const KindName& k) { return kind == k.name; });
    if (it == std::end(kKindNames)) throw ParseError(path + "/kind", "unknown effect kind '" + kind + "'");
    spec.kind = it->kind;

    auto num = [&](const char* key, double fallback) {
      if (!e.contains(key)) return fallback;
      if (!e[key].is_number()) throw ParseError(path + "/" + key, "expected a number");
      return e[key].get<double>();
    };
    spec.fc = num("fc", spec.fc);
    spec.q = num("q", spec.q);
    spec.gain_db = num("gain_db", spec.gain_db);
    spec.duration_s = num("duration_s", spec.duration_s);
    spec.compressor.threshold_db = num("threshold_db", spec.compressor.threshold_db);
    spec.compressor.ratio = num("ratio", spec.compressor.ratio);
    spec.compressor.knee_db = num("knee_db", spec.compressor.knee_db);
    spec.compressor.attack_s = num("attack_s", spec.compressor.attack_s);
    spec.compressor.release_s = num("release_s", spec.compressor.release_s);
    if (spec.kind == EffectKind::convolver) {
      if (!e.contains("impulse") || !e["impulse"].is_string()) {
        throw ParseError(path + "/impulse", "convolver needs an impulse file reference");
      }
      spec.impulse = load_impulse(e["impulse"].get<std::string>());
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace binscape::fx
