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


#include "binscape/service/server.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include "binscape/audio/wav.hpp"
#include "binscape/binaural/hrir_set.hpp"
#include "binscape/engine/engine.hpp"
#include "binscape/error.hpp"
#include "binscape/model/embed.hpp"
#include "binscape/model/serialize.hpp"
#include "binscape/model/validate.hpp"
#include "binscape/service/protocol.hpp"
#include "binscape/service/storage.hpp"
#include "binscape/traj/trajectory.hpp"

namespace binscape::service {
namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;
using Request = http::request<http::string_body>;
using Response = http::response<http::string_body>;

constexpr auto kFramePeriod = std::chrono::microseconds(1'000'000 * kWireFrames / 48000);
// A client that stops reading is dropped once this many messages are queued.
constexpr std::size_t kMaxQueuedWrites = 256;

struct Shared {
  Shared(ServiceConfig c, std::shared_ptr<const binaural::HrirSet> h)
      : config(std::move(c)), storage(config.data_dir), hrirs(std::move(h)) {}
  ServiceConfig config;
  Storage storage;
  std::shared_ptr<const binaural::HrirSet> hrirs;
};

// Error carrying an HTTP status and a JSON error body.
struct HttpError {
  http::status status;
  std::string code;
  std::string message;
  std::string path;
  nlohmann::json extra = nlohmann::json::object();
};

struct Target {
  std::string path;
  std::string query;
};

std::string_view target_view(const Request& req) {
  const auto t = req.target();
  return {t.data(), t.size()};
}

Target split_target(std::string_view t) {
  const auto q = t.find('?');
  if (q == std::string_view::npos) return {std::string(t), {}};
  return {std::string(t.substr(0, q)), std::string(t.substr(q + 1))};
}

std::optional<std::string> query_param(const std::string& query, const std::string& key) {
  std::size_t pos = 0;
  while (pos <= query.size()) {
    const auto amp = query.find('&', pos);
    const auto item = query.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
    const auto eq = item.find('=');
    if (item.substr(0, eq) == key) return eq == std::string::npos ? "" : item.substr(eq + 1);
    if (amp == std::string::npos) break;
    pos = amp + 1;
  }
  return std::nullopt;
}

// "/prefix/{id}" -> id, or nullopt when the path has another shape.
std::optional<std::string> route_id(const std::string& path, std::string_view prefix) {
  if (path.rfind(prefix, 0) != 0) return std::nullopt;
  auto id = path.substr(prefix.size());
  if (id.empty() || id.find('/') != std::string::npos) return std::nullopt;
  return id;
}

std::span<const std::uint8_t> bytes_of(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

void add_cors(Response& res, const ServiceConfig& cfg) {
  res.set(http::field::access_control_allow_origin, cfg.cors_origin);
  res.set(http::field::access_control_allow_methods, "GET, PUT, POST, OPTIONS");
  res.set(http::field::access_control_allow_headers, "Content-Type");
}

Response make_response(const Request& req, http::status status, std::string body,
                       const std::string& content_type) {
  Response res{status, req.version()};
  res.set(http::field::server, "binscape");
  res.set(http::field::content_type, content_type);
  res.keep_alive(req.keep_alive());
  res.body() = std::move(body);
  res.prepare_payload();
  return res;
}

Response json_response(const Request& req, http::status status, const nlohmann::json& body) {
  return make_response(req, status, body.dump(), "application/json");
}

Response bytes_response(const Request& req, const std::vector<std::uint8_t>& bytes,
                        const std::string& type) {
  return make_response(req, http::status::ok, std::string(bytes.begin(), bytes.end()), type);
}

nlohmann::json error_body(const HttpError& e) {
  nlohmann::json body = {{"code", e.code}, {"message", e.message}, {"path", e.path}};
  body.update(e.extra);
  return body;
}

HttpError not_found(const std::string& what) {
  return {http::status::not_found, "not_found", what + " not found", ""};
}

model::Soundscape load_soundscape(Shared& shared, const std::string& id) {
  try {
    auto s = shared.storage.get_soundscape(id);
    if (!s) throw not_found("soundscape '" + id + "'");
    return *s;
  } catch (const Error& e) {
    throw HttpError{http::status::internal_server_error, "storage", e.what(), ""};
  }
}

engine::AssetMap load_session_assets(Shared& shared, const model::Soundscape& s) {
  try {
    return engine::load_assets(s, shared.storage.resolver());
  } catch (const Error& e) {
    throw HttpError{http::status::unprocessable_entity, "asset_unavailable", e.what(), ""};
  }
}

Response handle_put_soundscape(Shared& shared, const Request& req) {
  model::Deserialized doc;
  try {
    doc = model::deserialize(req.body());
  } catch (const ParseError& e) {
    throw HttpError{http::status::bad_request, "parse_error", e.what(), e.path()};
  }
  const auto report = model::validate(doc.soundscape);
  auto report_json = model::to_json(report);
  for (const auto& w : doc.warnings) {
    report_json["issues"].push_back(
        nlohmann::json{{"severity", "warning"}, {"path", w.path}, {"message", w.message}});
  }
  if (!report.ok()) {
    std::string path, message = "soundscape failed validation";
    for (const auto& i : report.issues) {
      if (i.severity == model::Severity::error) {
        path = i.path;
        message = i.message;
        break;
      }
    }
    throw HttpError{http::status::unprocessable_entity, "validation_failed", message, path,
                    {{"report", report_json}}};
  }
  const auto id = shared.storage.put_soundscape(doc.soundscape);
  return json_response(req, http::status::ok, {{"id", id}, {"report", report_json}});
}

Response handle_render(Shared& shared, const Request& req) {
  const auto body = nlohmann::json::parse(req.body(), nullptr, false);
  if (!body.is_object()) throw HttpError{http::status::bad_request, "parse_error", "expected a JSON object", ""};
  if (!body.contains("soundscape") || !body["soundscape"].is_string()) {
    throw HttpError{http::status::bad_request, "parse_error", "missing soundscape id", "/soundscape"};
  }
  if (!body.contains("trajectory")) {
    throw HttpError{http::status::bad_request, "parse_error", "missing trajectory", "/trajectory"};
  }
  traj::Trajectory trajectory;
  try {
    trajectory = traj::trajectory_from_json(body["trajectory"]);
  } catch (const Error& e) {
    throw HttpError{http::status::bad_request, "bad_trajectory", e.what(), "/trajectory"};
  }
  if (trajectory.duration > shared.config.max_render_seconds) {
    throw HttpError{http::status::payload_too_large, "render_too_long",
                    "projected duration exceeds " +
                        std::to_string(static_cast<int>(shared.config.max_render_seconds)) + " s",
                    "/trajectory/duration"};
  }
  audio::SampleDepth depth = audio::SampleDepth::float32;
  const std::string d = body.value("depth", std::string("float32"));
  if (d == "pcm16") depth = audio::SampleDepth::pcm16;
  else if (d != "float32") throw HttpError{http::status::bad_request, "parse_error", "depth must be pcm16 or float32", "/depth"};

  const auto scape = load_soundscape(shared, body["soundscape"].get<std::string>());
  const auto assets = load_session_assets(shared, scape);
  const auto rendered = traj::render_offline(scape, trajectory, assets, shared.hrirs);
  return bytes_response(req, audio::encode_wav(rendered, depth), "audio/wav");
}

Response handle(Shared& shared, const Request& req) {
  const auto [path, query] = split_target(target_view(req));
  const auto method = req.method();

  if (method == http::verb::options) {
    Response res{http::status::no_content, req.version()};
    res.keep_alive(req.keep_alive());
    return res;
  }
  if (path == "/health" && method == http::verb::get) {
    return json_response(req, http::status::ok, {{"ok", true}});
  }
  if (path == "/assets" && method == http::verb::put) {
    try {
      const auto info = shared.storage.put_asset(bytes_of(req.body()));
      return json_response(req, http::status::ok,
                           {{"id", info.id},
                            {"duration", info.duration},
                            {"channels", info.channels},
                            {"sample_rate", info.sample_rate}});
    } catch (const UnsupportedCodecError& e) {
      throw HttpError{http::status::bad_request, "unsupported_codec", e.what(), ""};
    } catch (const TruncatedError& e) {
      throw HttpError{http::status::bad_request, "truncated", e.what(), ""};
    } catch (const ParseError& e) {
      throw HttpError{http::status::bad_request, "not_wav", e.what(), e.path()};
    }
  }
  if (auto id = route_id(path, "/assets/"); id && method == http::verb::get) {
    const auto bytes = shared.storage.get_asset(*id);
    if (!bytes) throw not_found("asset '" + *id + "'");
    return bytes_response(req, *bytes, "audio/wav");
  }
  if (path == "/soundscapes" && (method == http::verb::put || method == http::verb::post)) {
    return handle_put_soundscape(shared, req);
  }
  if (auto id = route_id(path, "/soundscapes/"); id && method == http::verb::get) {
    auto scape = load_soundscape(shared, *id);
    if (query_param(query, "embed").value_or("false") == "true") {
      try {
        scape = model::embed_assets(scape, shared.storage.resolver());
      } catch (const Error& e) {
        throw HttpError{http::status::unprocessable_entity, "asset_unavailable", e.what(), ""};
      }
    }
    return make_response(req, http::status::ok, model::canonical_dump(model::to_json(scape)),
                         "application/json");
  }
  if (path == "/render" && method == http::verb::post) return handle_render(shared, req);
  if (auto id = route_id(path, "/recordings/"); id && method == http::verb::get) {
    const auto bytes = shared.storage.get_recording(*id);
    if (!bytes) throw not_found("recording '" + *id + "'");
    return bytes_response(req, *bytes, "audio/wav");
  }
  throw not_found("route " + std::string(req.method_string()) + " " + path);
}

Response handle_safely(Shared& shared, const Request& req) {
  Response res;
  try {
    res = handle(shared, req);
  } catch (const HttpError& e) {
    res = json_response(req, e.status, error_body(e));
  } catch (const ParseError& e) {
    res = json_response(req, http::status::bad_request,
                        {{"code", "parse_error"}, {"message", e.what()}, {"path", e.path()}});
  } catch (const Error& e) {
    res = json_response(req, http::status::bad_request,
                        {{"code", "bad_request"}, {"message", e.what()}, {"path", ""}});
  } catch (const std::exception& e) {
    res = json_response(req, http::status::internal_server_error,
                        {{"code", "internal"}, {"message", e.what()}, {"path", ""}});
  }
  add_cors(res, shared.config);
  return res;
}

// One live audition: an engine, a framer and a real-time pacing timer, all
// driven from the connection's strand.
class LiveSession : public std::enable_shared_from_this<LiveSession> {
 public:
  LiveSession(tcp::socket&& socket, std::shared_ptr<Shared> shared,
              std::unique_ptr<engine::Engine> eng)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        shared_(std::move(shared)),
        engine_(std::move(eng)),
        framer_(*engine_) {
    engine_->set_error_handler([this](const std::string& msg) {
      send_text({{"type", "error"}, {"message", msg}});
    });
  }

  void run(Request req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(http::field::server, "binscape");
    }));
    ws_.async_accept(req, beast::bind_front_handler(&LiveSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    send_text({{"type", "hello"},
               {"sample_rate", audio::kEngineRate},
               {"frame_count", kWireFrames},
               {"magic", kFrameMagic}});
    start_ = std::chrono::steady_clock::now();
    do_read();
    on_tick({});
  }

  void do_read() {
    ws_.async_read(in_, beast::bind_front_handler(&LiveSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    const std::string text = beast::buffers_to_string(in_.data());
    in_.consume(in_.size());
    if (!ws_.got_text()) {
      send_text({{"type", "error"}, {"message", "binary client messages are not supported"}});
    } else {
      try {
        auto msg = parse_client_message(text);
        if (const auto* p = std::get_if<engine::SetSourceParam>(&msg);
            p && !engine_->lane_index(p->source)) {
          send_text({{"type", "error"}, {"message", "unknown source '" + p->source + "'"}});
        } else {
          engine_->post(std::move(msg));
        }
      } catch (const ParseError& e) {
        send_text({{"type", "error"}, {"message", e.what()}, {"path", e.path()}});
      }
    }
    do_read();
  }

  void on_tick(beast::error_code ec) {
    if (ec || closed_) return;
    const auto frame = framer_.next();
    send_binary(std::make_shared<std::vector<std::uint8_t>>(encode_frame(frame)));
    if (auto rec = engine_->take_finished_recording()) finish_recording(*rec);
    timer_.expires_at(start_ + kFramePeriod * (frame.sequence + 1));
    timer_.async_wait(beast::bind_front_handler(&LiveSession::on_tick, shared_from_this()));
  }

  void finish_recording(const audio::AudioBuffer& rec) {
    try {
      const auto wav = audio::encode_wav(rec, audio::SampleDepth::float32);
      const auto id = shared_->storage.put_recording(wav);
      send_text({{"type", "recording"},
                 {"id", id},
                 {"url", "/recordings/" + id},
                 {"frames", rec.frames()}});
    } catch (const Error& e) {
      send_text({{"type", "error"}, {"message", std::string("recording failed: ") + e.what()}});
    }
  }

  struct Outgoing {
    std::shared_ptr<std::vector<std::uint8_t>> data;
    bool binary;
  };

  void send_text(const nlohmann::json& msg) {
    const auto s = msg.dump();
    enqueue({std::make_shared<std::vector<std::uint8_t>>(s.begin(), s.end()), false});
  }
  void send_binary(std::shared_ptr<std::vector<std::uint8_t>> data) {
    enqueue({std::move(data), true});
  }

  void enqueue(Outgoing out) {
    if (closed_) return;
    if (queue_.size() >= kMaxQueuedWrites) {
      closed_ = true;
      timer_.cancel();
      beast::get_lowest_layer(ws_).close();
      return;
    }
    queue_.push_back(std::move(out));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    auto& front = queue_.front();
    ws_.binary(front.binary);
    ws_.async_write(net::buffer(*front.data),
                    beast::bind_front_handler(&LiveSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      timer_.cancel();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  std::shared_ptr<Shared> shared_;
  std::unique_ptr<engine::Engine> engine_;
  Framer framer_;
  beast::flat_buffer in_;
  std::deque<Outgoing> queue_;
  std::chrono::steady_clock::time_point start_;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, std::shared_ptr<Shared> shared)
      : stream_(std::move(socket)), shared_(std::move(shared)) {}

  void run() {
    net::dispatch(stream_.get_executor(),
                  beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    parser_.emplace();
    parser_->body_limit(shared_->config.max_body_bytes);
    stream_.expires_after(std::chrono::seconds(60));
    http::async_read(stream_, buffer_, *parser_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;
    auto req = parser_->release();
    const auto target = split_target(target_view(req)).path;
    if (websocket::is_upgrade(req)) {
      if (auto id = route_id(target, "/session/")) {
        upgrade(*id, std::move(req));
        return;
      }
    }
    // Renders can take a while; the stream timeout covers reads only.
    stream_.expires_never();
    send(handle_safely(*shared_, req));
  }

  void upgrade(const std::string& id, Request req) {
    try {
      const auto scape = load_soundscape(*shared_, id);
      const auto assets = load_session_assets(*shared_, scape);
      auto eng = std::make_unique<engine::Engine>(scape, assets, shared_->hrirs);
      stream_.expires_never();
      std::make_shared<LiveSession>(stream_.release_socket(), shared_, std::move(eng))
          ->run(std::move(req));
    } catch (const HttpError& e) {
      auto res = json_response(req, e.status, error_body(e));
      add_cors(res, shared_->config);
      send(std::move(res));
    } catch (const std::exception& e) {
      auto res = json_response(req, http::status::internal_server_error,
                               {{"code", "internal"}, {"message", e.what()}, {"path", ""}});
      add_cors(res, shared_->config);
      send(std::move(res));
    }
  }

  void send(Response res) {
    auto sp = std::make_shared<Response>(std::move(res));
    http::async_write(stream_, *sp,
                      [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
                        self->on_write(sp->need_eof(), ec);
                      });
  }

  void on_write(bool close, beast::error_code ec) {
    if (ec) return;
    if (close) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    do_read();
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  std::shared_ptr<Shared> shared_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, tcp::endpoint ep, std::shared_ptr<Shared> shared)
      : ioc_(ioc), acceptor_(net::make_strand(ioc)), shared_(std::move(shared)) {
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }
  void run() { do_accept(); }
  void close() {
    net::post(acceptor_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      self->acceptor_.close(ec);
    });
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_),
                           beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }
  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), shared_)->run();
    do_accept();
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  std::shared_ptr<Shared> shared_;
};

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig cfg;
  if (const char* p = std::getenv("PORT")) cfg.port = static_cast<unsigned short>(std::atoi(p));
  if (const char* d = std::getenv("DATA_DIR")) cfg.data_dir = d;
  if (const char* h = std::getenv("HRIR_DIR")) cfg.hrir_dir = h;
  return cfg;
}

struct Server::Impl {
  explicit Impl(ServiceConfig cfg) : ioc(std::max(1, cfg.threads)) {
    auto hrirs = cfg.hrir_dir.empty()
                     ? binaural::synthetic_hrir_set()
                     : binaural::load_hrir_set(cfg.hrir_dir);
    if (hrirs.sample_rate != audio::kEngineRate) {
      hrirs = binaural::resample_hrir_set(hrirs, audio::kEngineRate);
    }
    shared = std::make_shared<Shared>(
        std::move(cfg), std::make_shared<const binaural::HrirSet>(std::move(hrirs)));
  }

  net::io_context ioc;
  std::shared_ptr<Shared> shared;
  std::shared_ptr<Listener> listener;
  std::vector<std::thread> threads;
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stopped = false;
};

Server::Server(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Server::~Server() { stop(); }

void Server::start() {
  const auto& cfg = impl_->shared->config;
  const tcp::endpoint ep{net::ip::make_address(cfg.address), cfg.port};
  impl_->listener = std::make_shared<Listener>(impl_->ioc, ep, impl_->shared);
  impl_->listener->run();
  for (int i = 0; i < std::max(1, cfg.threads); ++i) {
    impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  }
}

void Server::run() {
  start();
  std::unique_lock lock(impl_->mutex);
  impl_->stopped_cv.wait(lock, [this] { return impl_->stopped; });
}

void Server::stop() {
  if (!impl_) return;
  if (impl_->listener) impl_->listener->close();
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable() && t.get_id() != std::this_thread::get_id()) t.join();
  }
  impl_->threads.clear();
  {
    std::lock_guard lock(impl_->mutex);
    impl_->stopped = true;
  }
  impl_->stopped_cv.notify_all();
}

unsigned short Server::port() const {
  return impl_->listener ? impl_->listener->port() : 0;
}

}  // namespace binscape::service
