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


#include "binscape/service/storage.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include <sodium.h>
#include <unistd.h>

#include "binscape/audio/wav.hpp"
#include "binscape/error.hpp"
#include "binscape/model/serialize.hpp"

namespace binscape::service {
namespace {

void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw Error("libsodium failed to initialise");
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

}  // namespace

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  ensure_sodium();
  unsigned char digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, bytes.data(), bytes.size());
  char hex[crypto_hash_sha256_BYTES * 2 + 1];
  sodium_bin2hex(hex, sizeof hex, digest, sizeof digest);
  return hex;
}

std::string content_id(std::span<const std::uint8_t> bytes) {
  return sha256_hex(bytes).substr(0, 16);
}

bool valid_id(const std::string& id) {
  if (id.size() != 16) return false;
  for (char c : id) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  static std::atomic<unsigned long> counter{0};
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(reinterpret_cast<const char*>(bytes.data()),
                           static_cast<std::streamsize>(bytes.size()))) {
      throw IoError("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " into place");
  }
}

Storage::Storage(std::filesystem::path root) : root_(std::move(root)) {
  ensure_sodium();
  for (const char* sub : {"assets", "soundscapes", "recordings"}) {
    std::filesystem::create_directories(root_ / sub);
  }
  if (!std::filesystem::exists(root_ / "index.json")) {
    const std::string empty =
        nlohmann::json{{"assets", nlohmann::json::object()},
                       {"soundscapes", nlohmann::json::object()},
                       {"recordings", nlohmann::json::object()}}
            .dump(2);
    write_atomic(root_ / "index.json", as_bytes(empty));
  }
}

std::optional<std::vector<std::uint8_t>> Storage::read(const std::filesystem::path& p) const {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

nlohmann::json Storage::index() const {
  std::lock_guard lock(mutex_);
  const auto bytes = read(root_ / "index.json");
  if (!bytes) return nlohmann::json::object();
  return nlohmann::json::parse(bytes->begin(), bytes->end(), nullptr, false);
}

void Storage::record(const std::string& kind, const std::string& id, nlohmann::json meta) {
  std::lock_guard lock(mutex_);
  auto bytes = read(root_ / "index.json");
  auto idx = bytes ? nlohmann::json::parse(bytes->begin(), bytes->end(), nullptr, false)
                   : nlohmann::json::object();
  if (!idx.is_object()) idx = nlohmann::json::object();
  if (idx[kind].contains(id)) return;
  meta["created_at"] = utc_now();
  idx[kind][id] = std::move(meta);
  write_atomic(root_ / "index.json", as_bytes(idx.dump(2)));
}

AssetInfo Storage::put_asset(std::span<const std::uint8_t> wav_bytes) {
  const auto decoded = audio::decode_wav(wav_bytes);
  AssetInfo info{content_id(wav_bytes), decoded.duration(), decoded.channel_count(),
                 decoded.sample_rate};
  const auto path = root_ / "assets" / (info.id + ".wav");
  if (!std::filesystem::exists(path)) write_atomic(path, wav_bytes);
  record("assets", info.id,
         {{"sha256", sha256_hex(wav_bytes)},
          {"size", wav_bytes.size()},
          {"duration", info.duration},
          {"channels", info.channels},
          {"sample_rate", info.sample_rate}});
  return info;
}

std::optional<std::vector<std::uint8_t>> Storage::get_asset(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  return read(root_ / "assets" / (id + ".wav"));
}

std::string Storage::put_soundscape(const model::Soundscape& s) {
  const std::string text = model::canonical_dump(model::to_json(s));
  const auto bytes = as_bytes(text);
  const std::string id = content_id(bytes);
  const auto path = root_ / "soundscapes" / (id + ".json");
  if (!std::filesystem::exists(path)) write_atomic(path, bytes);
  record("soundscapes", id,
         {{"sha256", sha256_hex(bytes)}, {"size", text.size()}, {"title", s.title}});
  return id;
}

std::optional<model::Soundscape> Storage::get_soundscape(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  const auto bytes = read(root_ / "soundscapes" / (id + ".json"));
  if (!bytes) return std::nullopt;
  return model::deserialize(std::string(bytes->begin(), bytes->end())).soundscape;
}

std::string Storage::put_recording(std::span<const std::uint8_t> wav_bytes) {
  const std::string id = content_id(wav_bytes);
  const auto path = root_ / "recordings" / (id + ".wav");
  if (!std::filesystem::exists(path)) write_atomic(path, wav_bytes);
  record("recordings", id, {{"sha256", sha256_hex(wav_bytes)}, {"size", wav_bytes.size()}});
  return id;
}

std::optional<std::vector<std::uint8_t>> Storage::get_recording(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  return read(root_ / "recordings" / (id + ".wav"));
}

model::Resolver Storage::resolver() const {
  return [this](const std::string& uri) -> std::vector<std::uint8_t> {
    const auto pos = uri.rfind("/assets/");
    const bool local = uri.rfind("/assets/", 0) == 0;
    const bool remote = uri.rfind("http://", 0) == 0 || uri.rfind("https://", 0) == 0;
    if (pos == std::string::npos || !(local || remote)) {
      throw IoError("cannot resolve asset uri '" + uri + "'");
    }
    auto bytes = get_asset(uri.substr(pos + 8));
    if (!bytes) throw IoError("asset '" + uri + "' is not stored");
    return *bytes;
  };
}

}  // namespace binscape::service
