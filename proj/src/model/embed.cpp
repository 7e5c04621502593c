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


#include "binscape/model/embed.hpp"

#include <algorithm>
#include <cctype>

#include <sodium.h>

#include "binscape/audio/wav.hpp"
#include "binscape/error.hpp"

namespace binscape::model {

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  constexpr int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), variant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &len, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw Error("invalid base64 payload");
  }
  out.resize(len);
  return out;
}

std::string media_type_for(const std::string& uri) {
  std::string path = uri.substr(0, uri.find_first_of("?#"));
  auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == "png") return "image/png";
  if (ext == "jpg" || ext == "jpeg") return "image/jpeg";
  if (ext == "svg") return "image/svg+xml";
  if (ext == "gif") return "image/gif";
  if (ext == "webp") return "image/webp";
  if (ext == "mp3") return "audio/mpeg";
  if (ext == "wav" || ext == "wave") return "audio/wav";
  return "application/octet-stream";
}

Soundscape embed_assets(const Soundscape& s, const Resolver& resolver) {
  Soundscape out = s;
  for (auto& src : out.sources) {
    if (!src.asset.uri) continue;
    const std::string uri = *src.asset.uri;
    std::vector<std::uint8_t> bytes;
    try {
      bytes = resolver(uri);
    } catch (const std::exception& e) {
      throw IoError("cannot resolve asset of source '" + src.id + "' at '" + uri + "': " + e.what());
    }
    audio::AudioBuffer decoded;
    try {
      decoded = audio::decode_wav(bytes);
    } catch (const std::exception& e) {
      throw IoError("asset of source '" + src.id + "' at '" + uri + "' is not a usable WAV: " +
                    e.what());
    }
    src.asset.uri.reset();
    src.asset.embedded = EmbeddedData{std::move(bytes), "audio/wav"};
    src.asset.channels = decoded.channel_count();
    src.asset.sample_rate = decoded.sample_rate;
    src.asset.duration = decoded.duration();
  }
  if (out.room.floorplan && out.room.floorplan->uri) {
    const std::string uri = *out.room.floorplan->uri;
    std::vector<std::uint8_t> bytes;
    try {
      bytes = resolver(uri);
    } catch (const std::exception& e) {
      throw IoError("cannot resolve floorplan at '" + uri + "': " + e.what());
    }
    out.room.floorplan->uri.reset();
    out.room.floorplan->embedded = EmbeddedData{std::move(bytes), media_type_for(uri)};
  }
  return out;
}

}  // namespace binscape::model
