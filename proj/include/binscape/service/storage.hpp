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
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "binscape/model/embed.hpp"
#include "binscape/model/soundscape.hpp"

namespace binscape::service {

/// First 16 hex digits of the SHA-256 of `bytes`.
std::string content_id(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Writes through a temporary file in the same directory and renames it
/// into place, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

struct AssetInfo {
  std::string id;
  double duration = 0.0;
  int channels = 0;
  int sample_rate = 0;
};

/// Content-addressed directory store:
///   root/assets/{id}.wav, root/soundscapes/{id}.json,
///   root/recordings/{id}.wav, root/index.json
/// Safe for concurrent use within one process.
class Storage {
 public:
  explicit Storage(std::filesystem::path root);

  /// Rejects anything that does not decode as WAV (codec errors propagate).
  AssetInfo put_asset(std::span<const std::uint8_t> wav_bytes);
  std::optional<std::vector<std::uint8_t>> get_asset(const std::string& id) const;

  /// Stores the canonical serialization; the caller validates first.
  std::string put_soundscape(const model::Soundscape& s);
  std::optional<model::Soundscape> get_soundscape(const std::string& id) const;

  std::string put_recording(std::span<const std::uint8_t> wav_bytes);
  std::optional<std::vector<std::uint8_t>> get_recording(const std::string& id) const;

  /// Resolves "/assets/{id}" and "http(s)://host/.../assets/{id}" from the
  /// asset store; anything else throws IoError.
  model::Resolver resolver() const;

  nlohmann::json index() const;
  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  void record(const std::string& kind, const std::string& id, nlohmann::json meta);
  std::optional<std::vector<std::uint8_t>> read(const std::filesystem::path& p) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// True for ids this store can have produced (16 lowercase hex digits).
bool valid_id(const std::string& id);

}  // namespace binscape::service
