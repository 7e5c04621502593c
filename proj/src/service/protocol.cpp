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


#include "binscape/service/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "binscape/error.hpp"

namespace binscape::service {
namespace {

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t at) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[at + i]) << (8 * i);
  return v;
}

double number_field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("/") + key, "missing field");
  if (!it->is_number() || !std::isfinite(it->get<double>())) {
    throw ParseError(std::string("/") + key, "expected a finite number");
  }
  return it->get<double>();
}

std::string string_field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("/") + key, "missing field");
  if (!it->is_string()) throw ParseError(std::string("/") + key, "expected a string");
  return it->get<std::string>();
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const WireFrame& f) {
  if (f.samples.size() % 2 != 0) throw ParameterError("wire frame needs interleaved stereo");
  if (f.frame_count() > 0xFFFF) throw ParameterError("wire frame too long");
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + 4 * f.samples.size());
  put_le<std::uint32_t>(out, kFrameMagic);
  put_le<std::uint32_t>(out, f.sequence);
  put_le<std::uint64_t>(out, f.sample_index);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(f.frame_count()));
  for (float s : f.samples) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(s));
  return out;
}

WireFrame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    throw TruncatedError(bytes.size(), "wire frame header truncated");
  }
  if (get_le<std::uint32_t>(bytes, 0) != kFrameMagic) throw ParseError("", "bad frame magic");
  WireFrame f;
  f.sequence = get_le<std::uint32_t>(bytes, 4);
  f.sample_index = get_le<std::uint64_t>(bytes, 8);
  const std::size_t frames = get_le<std::uint16_t>(bytes, 16);
  const std::size_t need = kFrameHeaderBytes + frames * 2 * 4;
  if (bytes.size() < need) throw TruncatedError(bytes.size(), "wire frame payload truncated");
  f.samples.resize(frames * 2);
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    f.samples[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, kFrameHeaderBytes + 4 * i));
  }
  return f;
}

ClientMessage parse_client_message(const std::string& text) {
  const auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("", "message is not valid JSON");
  if (!j.is_object()) throw ParseError("", "message must be an object");
  const std::string type = string_field(j, "type");
  if (type == "pose") {
    return engine::SetPose{{{number_field(j, "x"), number_field(j, "y")},
                            j.contains("yaw") ? number_field(j, "yaw") : 0.0}};
  }
  if (type == "transport") {
    const auto v = string_field(j, "value");
    if (v == "play") return engine::SetTransport{engine::Transport::playing};
    if (v == "stop") return engine::SetTransport{engine::Transport::stopped};
    throw ParseError("/value", "expected \"play\" or \"stop\"");
  }
  if (type == "set") {
    if (!j.contains("value")) throw ParseError("/value", "missing field");
    if (j.contains("source")) {
      return engine::SetSourceParam{string_field(j, "source"), string_field(j, "path"),
                                    j["value"]};
    }
    if (string_field(j, "path") == "master_gain_db") {
      return engine::SetMasterGain{number_field(j, "value")};
    }
    throw ParseError("/source", "missing field");
  }
  if (type == "record") {
    const auto v = string_field(j, "value");
    if (v == "start") return engine::StartRecord{};
    if (v == "stop") return engine::StopRecord{};
    throw ParseError("/value", "expected \"start\" or \"stop\"");
  }
  throw ParseError("/type", "unknown message type '" + type + "'");
}

Framer::Framer(engine::Engine& eng, std::uint16_t frame_count)
    : engine_(eng), frame_count_(frame_count) {
  if (frame_count_ == 0) throw ParameterError("wire frame size must be positive");
}

WireFrame Framer::next() {
  const std::size_t want = std::size_t{frame_count_} * 2;
  std::vector<float> l(engine::kBlockSize), r(engine::kBlockSize);
  while (pending_.size() < want) {
    engine_.process_block(l, r);
    for (std::size_t k = 0; k < engine::kBlockSize; ++k) {
      pending_.push_back(l[k]);
      pending_.push_back(r[k]);
    }
  }
  WireFrame f;
  f.sequence = sequence_++;
  f.sample_index = emitted_;
  f.samples.assign(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(want));
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(want));
  emitted_ += frame_count_;
  return f;
}

}  // namespace binscape::service
