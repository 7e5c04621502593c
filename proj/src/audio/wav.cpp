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


#include "binscape/audio/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "binscape/error.hpp"

namespace binscape::audio {
namespace {

constexpr unsigned kFormatPcm = 0x0001;
constexpr unsigned kFormatFloat = 0x0003;
constexpr unsigned kFormatExtensible = 0xFFFE;

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw TruncatedError(bytes_.size(), std::string("truncated WAV: ") + what +
                                              " ends at byte offset " +
                                              std::to_string(bytes_.size()));
    }
  }
  std::uint32_t u32() {
    need(4, "header");
    std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) | (bytes_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2, "header");
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4, "chunk id");
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n) { pos_ += std::min(n, remaining()); }
  const std::uint8_t* here() const { return bytes_.data() + pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Format {
  unsigned tag = 0;
  int channels = 0;
  int rate = 0;
  int bits = 0;
};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* t) { out.insert(out.end(), t, t + 4); }

std::string hex_tag(unsigned tag) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%04X", tag);
  return buf;
}

}  // namespace

AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  if (r.tag() != "RIFF") throw Error("not a RIFF file");
  r.u32();
  if (r.tag() != "WAVE") throw Error("RIFF container is not WAVE");

  Format fmt;
  bool have_fmt = false;
  while (r.remaining() >= 8) {
    const std::string id = r.tag();
    const std::uint32_t size = r.u32();
    if (id == "fmt ") {
      const std::size_t start = r.offset();
      r.need(16, "fmt chunk");
      fmt.tag = r.u16();
      fmt.channels = r.u16();
      fmt.rate = static_cast<int>(r.u32());
      r.u32();  // byte rate
      r.u16();  // block align
      fmt.bits = r.u16();
      if (fmt.tag == kFormatExtensible && size >= 40) {
        r.u16();  // cbSize
        r.u16();  // valid bits
        r.u32();  // channel mask
        fmt.tag = r.u16();  // first two bytes of the subformat GUID
      }
      r.skip(size - (r.offset() - start) + (size & 1));
      have_fmt = true;
      continue;
    }
    if (id != "data") {
      r.skip(size + (size & 1));
      continue;
    }
    if (!have_fmt) throw Error("data chunk precedes fmt chunk");
    const bool supported = (fmt.tag == kFormatPcm && (fmt.bits == 16 || fmt.bits == 24)) ||
                           (fmt.tag == kFormatFloat && fmt.bits == 32);
    if (!supported) {
      throw UnsupportedCodecError(fmt.tag, "unsupported WAV codec: format tag " +
                                               hex_tag(fmt.tag) + ", " +
                                               std::to_string(fmt.bits) + " bits");
    }
    if (fmt.channels < 1) throw Error("WAV declares zero channels");
    if (fmt.rate <= 0) throw Error("WAV declares a non-positive sample rate");
    if (r.remaining() < size) {
      throw TruncatedError(bytes.size(), "truncated WAV: data chunk declares " +
                                             std::to_string(size) +
                                             " bytes but file ends at byte offset " +
                                             std::to_string(bytes.size()));
    }
    const std::size_t width = static_cast<std::size_t>(fmt.bits / 8);
    const std::size_t frame_bytes = width * fmt.channels;
    const std::size_t frames = size / frame_bytes;
    AudioBuffer out(fmt.channels, frames, fmt.rate);
    const std::uint8_t* p = r.here();
    for (std::size_t i = 0; i < frames; ++i) {
      for (int c = 0; c < fmt.channels; ++c, p += width) {
        float v;
        if (fmt.tag == kFormatFloat) {
          std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
          v = std::bit_cast<float>(u);
        } else if (fmt.bits == 16) {
          auto s = static_cast<std::int16_t>(p[0] | (p[1] << 8));
          v = static_cast<float>(s / 32768.0);
        } else {
          std::int32_t s = p[0] | (p[1] << 8) | (p[2] << 16);
          if (s & 0x800000) s -= 0x1000000;
          v = static_cast<float>(s / 8388608.0);
        }
        out.channels[static_cast<std::size_t>(c)][i] = v;
      }
    }
    return out;
  }
  if (!have_fmt) throw TruncatedError(bytes.size(), "truncated WAV: no fmt chunk before byte offset " + std::to_string(bytes.size()));
  throw TruncatedError(bytes.size(), "truncated WAV: no data chunk before byte offset " + std::to_string(bytes.size()));
}

std::int16_t quantize_pcm16(float x) noexcept {
  if (std::isnan(x)) return 0;
  const double scaled = std::round(static_cast<double>(x) * 32767.0);  // half away from zero
  return static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
}

std::vector<std::uint8_t> encode_wav(const AudioBuffer& buf, SampleDepth depth) {
  check_buffer(buf);
  const bool is_float = depth == SampleDepth::float32;
  const auto channels = static_cast<std::uint16_t>(buf.channel_count());
  const std::uint16_t width = is_float ? 4 : 2;
  const auto data_size = static_cast<std::uint32_t>(buf.frames() * channels * width);
  const std::uint32_t fmt_size = is_float ? 18 : 16;
  const std::uint32_t fact_size = is_float ? 12 : 0;

  std::vector<std::uint8_t> out;
  out.reserve(12 + 8 + fmt_size + fact_size + 8 + data_size + 1);
  put_tag(out, "RIFF");
  put_u32(out, 4 + 8 + fmt_size + fact_size + 8 + data_size + (data_size & 1));
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, fmt_size);
  put_u16(out, is_float ? kFormatFloat : kFormatPcm);
  put_u16(out, channels);
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(buf.sample_rate) * channels * width);
  put_u16(out, static_cast<std::uint16_t>(channels * width));
  put_u16(out, static_cast<std::uint16_t>(width * 8));
  if (is_float) {
    put_u16(out, 0);
    put_tag(out, "fact");
    put_u32(out, 4);
    put_u32(out, static_cast<std::uint32_t>(buf.frames()));
  }
  put_tag(out, "data");
  put_u32(out, data_size);
  for (std::size_t i = 0; i < buf.frames(); ++i) {
    for (const auto& ch : buf.channels) {
      if (is_float) {
        put_u32(out, std::bit_cast<std::uint32_t>(ch[i]));
      } else {
        put_u16(out, static_cast<std::uint16_t>(quantize_pcm16(ch[i])));
      }
    }
  }
  if (data_size & 1) out.push_back(0);
  return out;
}

}  // namespace binscape::audio
