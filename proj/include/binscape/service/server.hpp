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
#include <filesystem>
#include <memory>
#include <string>

namespace binscape::service {

struct ServiceConfig {
  std::string address = "0.0.0.0";
  unsigned short port = 8080;  ///< 0 picks a free port
  std::filesystem::path data_dir = "store";
  std::filesystem::path hrir_dir;  ///< empty: built-in synthetic set
  int threads = 4;
  std::string cors_origin = "*";
  double max_render_seconds = 600.0;
  std::size_t max_body_bytes = std::size_t{512} << 20;

  /// Defaults overridden by PORT, DATA_DIR and HRIR_DIR when set.
  static ServiceConfig from_env();
};

/// HTTP API and live sessions on one port.
///
///   PUT  /assets              WAV bytes -> {id, duration, channels, sample_rate}
///   GET  /assets/{id}         WAV bytes
///   PUT  /soundscapes         JSON document -> {id, report} or 422 {.., report}
///   GET  /soundscapes/{id}    ?embed=true inlines assets
///   POST /render              {soundscape, trajectory, depth} -> WAV bytes
///   GET  /recordings/{id}     WAV bytes
///   GET  /session/{id}        WebSocket upgrade: text control messages in,
///                             binary PCM frames out, paced in real time
class Server {
 public:
  explicit Server(ServiceConfig config);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads; returns immediately.
  void start();
  /// start() and block until stop() is called from another thread.
  void run();
  void stop();
  /// Bound port, valid after start().
  unsigned short port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace binscape::service
