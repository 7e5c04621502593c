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


#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "binscape/binaural/hrir_set.hpp"
#include "binscape/error.hpp"
#include "binscape/model/serialize.hpp"
#include "binscape/service/protocol.hpp"
#include "binscape/service/server.hpp"
#include "binscape/service/storage.hpp"
#include "binscape/traj/trajectory.hpp"
#include "support.hpp"
#include "ws_client.hpp"

using namespace binscape;
using namespace binscape::service;
using testsupport::scene;
using testsupport::source;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("binscape_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<std::uint8_t> one_second_wav() {
  return audio::encode_wav(testsupport::mono(testsupport::noise(48000, 1)), audio::SampleDepth::pcm16);
}

std::uint32_t le32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

std::uint64_t le64(const std::uint8_t* p) {
  return std::uint64_t(le32(p)) | std::uint64_t(le32(p + 4)) << 32;
}

// Server on an ephemeral port with a fresh store.
struct Fixture {
  std::filesystem::path dir;
  std::unique_ptr<Server> server;
  std::unique_ptr<httplib::Client> http;

  explicit Fixture(const std::string& name) : dir(fresh_dir(name)) {
    ServiceConfig cfg;
    cfg.address = "127.0.0.1";
    cfg.port = 0;
    cfg.data_dir = dir;
    cfg.hrir_dir = std::filesystem::path(BINSCAPE_DATA_DIR) / "hrir" / "synthetic";
    cfg.threads = 4;
    cfg.max_render_seconds = 30;
    server = std::make_unique<Server>(cfg);
    server->start();
    http = std::make_unique<httplib::Client>("127.0.0.1", server->port());
    http->set_read_timeout(60, 0);
  }
  ~Fixture() {
    server->stop();
    std::filesystem::remove_all(dir);
  }

  std::string put_asset(const std::vector<std::uint8_t>& wav) {
    auto res = http->Put("/assets", std::string(wav.begin(), wav.end()), "audio/wav");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return nlohmann::json::parse(res->body)["id"];
  }

  std::string put_scape(const model::Soundscape& s) {
    auto res = http->Put("/soundscapes", model::serialize(s), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return nlohmann::json::parse(res->body)["id"];
  }
};

}  // namespace

TEST_CASE("wire frame layout is little-endian") {
  WireFrame f;
  f.sequence = 0x01020304;
  f.sample_index = 0x1122334455667788ull;
  f.samples = {0.5f, -0.25f, 1.0f, 0.0f};
  const auto bytes = encode_frame(f);
  REQUIRE(bytes.size() == kFrameHeaderBytes + 16);
  CHECK(kFrameHeaderBytes == 18);
  const std::uint8_t magic[] = {0x4E, 0x4F, 0x53, 0x50};
  CHECK(std::memcmp(bytes.data(), magic, 4) == 0);
  CHECK(le32(bytes.data() + 4) == 0x01020304);
  CHECK(le64(bytes.data() + 8) == 0x1122334455667788ull);
  CHECK((bytes[16] | bytes[17] << 8) == 2);
  // 0.5f = 0x3F000000
  CHECK(le32(bytes.data() + 18) == 0x3F000000u);
  CHECK(decode_frame(bytes) == f);

  auto bad = bytes;
  bad[0] ^= 1;
  CHECK_THROWS_AS(decode_frame(bad), ParseError);
  CHECK_THROWS_AS(decode_frame(std::span(bytes).first(10)), TruncatedError);
  CHECK_THROWS_AS(decode_frame(std::span(bytes).first(bytes.size() - 1)), TruncatedError);
}

TEST_CASE("client message parsing") {
  auto m = parse_client_message(R"({"type":"pose","x":1.5,"y":-2,"yaw":0.25})");
  const auto* pose = std::get_if<engine::SetPose>(&m);
  REQUIRE(pose);
  CHECK(pose->pose.position == model::Vec2{1.5, -2});
  CHECK(pose->pose.yaw == 0.25);

  m = parse_client_message(R"({"type":"transport","value":"play"})");
  CHECK(std::get<engine::SetTransport>(m).value == engine::Transport::playing);
  m = parse_client_message(R"({"type":"transport","value":"stop"})");
  CHECK(std::get<engine::SetTransport>(m).value == engine::Transport::stopped);

  m = parse_client_message(R"({"type":"set","source":"bees","path":"gain_db","value":-3})");
  const auto& sp = std::get<engine::SetSourceParam>(m);
  CHECK(sp.source == "bees");
  CHECK(sp.path == "gain_db");
  CHECK(sp.value == -3);
  m = parse_client_message(R"({"type":"set","path":"master_gain_db","value":-6})");
  CHECK(std::get<engine::SetMasterGain>(m).gain_db == -6);

  CHECK(std::holds_alternative<engine::StartRecord>(parse_client_message(R"({"type":"record","value":"start"})")));
  CHECK(std::holds_alternative<engine::StopRecord>(parse_client_message(R"({"type":"record","value":"stop"})")));

  auto path_of = [](const std::string& text) {
    try {
      parse_client_message(text);
    } catch (const ParseError& e) {
      return e.path();
    }
    return std::string("no error");
  };
  CHECK(path_of(R"({"type":"pose","x":1,"yaw":0})") == "/y");
  CHECK(path_of(R"({"type":"pose","x":"a","y":0,"yaw":0})") == "/x");
  CHECK(path_of(R"({"type":"transport","value":"pause"})") == "/value");
  CHECK(path_of(R"({"type":"dance"})") == "/type");
  CHECK(path_of(R"({"value":1})") == "/type");
  CHECK(path_of("not json") != "no error");
  CHECK(path_of("[1,2]") != "no error");
}

TEST_CASE("framer re-chunks engine blocks gaplessly") {
  auto a = source("a", {1, 1});
  a.loop = true;
  const auto s = scene({a});
  const auto set = std::make_shared<const binaural::HrirSet>(binaural::synthetic_hrir_set());
  engine::AssetMap m{{"a", testsupport::mono(testsupport::noise(3000, 2))}};
  engine::Engine e(s, m, set);
  engine::Engine ref(s, m, set);
  e.apply(engine::SetTransport{engine::Transport::playing});
  ref.apply(engine::SetTransport{engine::Transport::playing});
  Framer framer(e);
  const auto expect = ref.render(8 * 960 / 128);
  for (std::uint32_t i = 0; i < 8; ++i) {
    const auto f = framer.next();
    CHECK(f.sequence == i);
    CHECK(f.sample_index == std::uint64_t(i) * 960);
    REQUIRE(f.frame_count() == 960);
    for (std::size_t k = 0; k < 960; ++k) {
      CHECK(f.samples[2 * k] == expect.channels[0][i * 960 + k]);
      CHECK(f.samples[2 * k + 1] == expect.channels[1][i * 960 + k]);
    }
  }
}

TEST_CASE("storage") {
  const auto dir = fresh_dir("storage");
  Storage st(dir);
  // SHA-256("abc")
  const std::string abc = "abc";
  const std::vector<std::uint8_t> abc_bytes(abc.begin(), abc.end());
  CHECK(sha256_hex(abc_bytes) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(content_id(abc_bytes) == "ba7816bf8f01cfea");
  CHECK(valid_id("ba7816bf8f01cfea"));
  CHECK_FALSE(valid_id("../etc/passwd000"));
  CHECK_FALSE(valid_id("BA7816BF8F01CFEA"));

  const auto wav = one_second_wav();
  const auto info = st.put_asset(wav);
  CHECK(info.id == content_id(wav));
  CHECK(info.duration == 1.0);
  CHECK(info.channels == 1);
  CHECK(info.sample_rate == 48000);
  CHECK(st.get_asset(info.id) == wav);
  CHECK_FALSE(st.get_asset("0000000000000000").has_value());
  CHECK_FALSE(st.get_asset("nonsense").has_value());
  CHECK(st.put_asset(wav).id == info.id);  // content-addressed

  const std::vector<std::uint8_t> junk(100, 7);
  CHECK_THROWS_AS(st.put_asset(junk), Error);

  auto a = source("a");
  a.asset.uri = "/assets/" + info.id;
  const auto s = scene({a});
  const auto id = st.put_soundscape(s);
  CHECK(st.get_soundscape(id) == s);
  const auto bytes = st.resolver()("/assets/" + info.id);
  CHECK(bytes == wav);
  CHECK(st.resolver()("http://host:8080/assets/" + info.id) == wav);
  CHECK_THROWS_AS(st.resolver()("ftp://x/assets/" + info.id), IoError);
  CHECK_THROWS_AS(st.resolver()("/assets/0000000000000000"), IoError);

  const auto rec = st.put_recording(wav);
  CHECK(st.get_recording(rec) == wav);

  const auto index = st.index();
  CHECK(index["assets"].contains(info.id));
  CHECK(index["assets"][info.id]["sha256"] == sha256_hex(wav));
  CHECK(index["soundscapes"].contains(id));
  CHECK(index["recordings"].contains(rec));

  // Survives a reopen.
  Storage again(dir);
  CHECK(again.get_soundscape(id) == s);
  CHECK(again.index()["assets"].contains(info.id));

  // No temporary files are left behind.
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("HTTP API") {
  Fixture fx("http");
  auto& cli = *fx.http;

  SUBCASE("health and CORS") {
    auto res = cli.Get("/health");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    res = cli.Options("/assets");
    REQUIRE(res);
    CHECK(res->status == 204);
    CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK_FALSE(res->get_header_value("Access-Control-Allow-Methods").empty());
  }

  SUBCASE("assets") {
    const auto wav = one_second_wav();
    auto res = cli.Put("/assets", std::string(wav.begin(), wav.end()), "audio/wav");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto body = nlohmann::json::parse(res->body);
    CHECK(body["duration"] == 1.0);
    CHECK(body["channels"] == 1);
    CHECK(body["sample_rate"] == 48000);
    const std::string id = body["id"];

    res = cli.Get("/assets/" + id);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == std::string(wav.begin(), wav.end()));

    res = cli.Get("/assets/0123456789abcdef");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(nlohmann::json::parse(res->body)["code"] == "not_found");

    res = cli.Put("/assets", "this is not audio", "audio/wav");
    REQUIRE(res);
    CHECK(res->status == 400);
    const auto err = nlohmann::json::parse(res->body);
    CHECK(err.contains("code"));
    CHECK(err.contains("message"));
    CHECK(err.contains("path"));

    // MP3-in-RIFF: the message names the codec tag.
    auto mp3 = wav;
    mp3[20] = 0x55;
    mp3[21] = 0x00;
    res = cli.Put("/assets", std::string(mp3.begin(), mp3.end()), "audio/wav");
    REQUIRE(res);
    CHECK(res->status == 400);
    const auto codec = nlohmann::json::parse(res->body);
    CHECK(codec["code"] == "unsupported_codec");
    CHECK(codec["message"].get<std::string>().find("0x0055") != std::string::npos);
  }

  SUBCASE("soundscapes") {
    const auto id_asset = fx.put_asset(one_second_wav());
    auto a = source("a", {1, 1});
    a.asset.uri = "/assets/" + id_asset;
    auto b = source("b", {-1, 1});
    b.asset.uri = "/assets/" + id_asset;
    auto s = scene({a, b});
    const auto id = fx.put_scape(s);

    auto res = cli.Get("/soundscapes/" + id);
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(model::deserialize(res->body).soundscape == s);

    res = cli.Get("/soundscapes/" + id + "?embed=true");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto embedded = model::deserialize(res->body).soundscape;
    CHECK(res->body.find("\"uri\"") == std::string::npos);
    for (const auto& src : embedded.sources) {
      CHECK_FALSE(src.asset.uri.has_value());
      CHECK(src.asset.embedded.has_value());
      CHECK(src.asset.duration == 1.0);
    }

    res = cli.Get("/soundscapes/" + id + "?embed=false");
    REQUIRE(res);
    CHECK(res->body.find("\"uri\"") != std::string::npos);

    // Timing cycle: 422 with the report, nothing stored.
    s.sources[0].timings.push_back({"b", model::TimingMode::after_completes, nlohmann::json::object()});
    s.sources[1].timings.push_back({"a", model::TimingMode::after_completes, nlohmann::json::object()});
    res = cli.Put("/soundscapes", model::to_json(s).dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 422);
    const auto err = nlohmann::json::parse(res->body);
    CHECK(err["code"] == "validation_failed");
    REQUIRE(err.contains("report"));
    CHECK(err["report"]["issues"].dump().find("timing cycle") != std::string::npos);
    CHECK(std::distance(std::filesystem::directory_iterator(fx.dir / "soundscapes"),
                        std::filesystem::directory_iterator{}) == 1);

    res = cli.Put("/soundscapes", R"({"sources": []})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(nlohmann::json::parse(res->body)["path"] == "/room");

    res = cli.Get("/soundscapes/ffffffffffffffff");
    REQUIRE(res);
    CHECK(res->status == 404);
  }

  SUBCASE("render") {
    const auto id_asset = fx.put_asset(one_second_wav());
    auto a = source("a", {1, 1});
    a.asset.uri = "/assets/" + id_asset;
    const auto s = scene({a});
    const auto id = fx.put_scape(s);
    const nlohmann::json traj = {{"duration", 0.5},
                                 {"waypoints", {{{"t", 0}, {"position", {0, 0}}, {"yaw", 0}}}}};
    auto res = cli.Post("/render", nlohmann::json{{"soundscape", id}, {"trajectory", traj}}.dump(),
                        "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const std::vector<std::uint8_t> bytes(res->body.begin(), res->body.end());
    const auto out = audio::decode_wav(bytes);
    CHECK(out.channel_count() == 2);
    CHECK(out.frames() == 24064);  // ceil(24000 / 128) * 128

    // Same as rendering locally.
    engine::AssetMap m{{"a", audio::decode_wav(one_second_wav())}};
    const auto local = traj::render_offline(
        s, traj::trajectory_from_json(traj), m,
        std::make_shared<const binaural::HrirSet>(binaural::load_hrir_set(std::filesystem::path(BINSCAPE_DATA_DIR) / "hrir" / "synthetic")));
    CHECK(local == out);

    res = cli.Post("/render",
                   nlohmann::json{{"soundscape", id}, {"trajectory", traj}, {"depth", "pcm16"}}.dump(),
                   "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body.size() == 44 + 24064 * 4);

    nlohmann::json long_traj = traj;
    long_traj["duration"] = 31;
    res = cli.Post("/render", nlohmann::json{{"soundscape", id}, {"trajectory", long_traj}}.dump(),
                   "application/json");
    REQUIRE(res);
    CHECK(res->status == 413);
    CHECK(nlohmann::json::parse(res->body)["code"] == "render_too_long");

    res = cli.Post("/render", R"({"trajectory": {}})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    res = cli.Post("/render", nlohmann::json{{"soundscape", "ffffffffffffffff"}, {"trajectory", traj}}.dump(),
                   "application/json");
    REQUIRE(res);
    CHECK(res->status == 404);
  }

  SUBCASE("unknown routes") {
    auto res = cli.Get("/nothing");
    REQUIRE(res);
    CHECK(res->status == 404);
    res = cli.Delete("/assets/0123456789abcdef");
    REQUIRE(res);
    CHECK(res->status >= 400);
  }
}

TEST_CASE("live session") {
  Fixture fx("session");
  const auto id_asset = fx.put_asset(one_second_wav());
  auto a = source("a", {1, 1});
  a.asset.uri = "/assets/" + id_asset;
  a.loop = true;
  const auto id = fx.put_scape(scene({a}));

  SUBCASE("unknown soundscape is refused") {
    CHECK_THROWS(testsupport::WsClient(fx.server->port(), "/session/ffffffffffffffff"));
  }

  SUBCASE("frames, errors and recording") {
    testsupport::WsClient ws(fx.server->port(), "/session/" + id);
    const auto hello = ws.read_text();
    CHECK(hello["type"] == "hello");
    CHECK(hello["frame_count"] == 960);
    CHECK(hello["sample_rate"] == 48000);

    ws.send({{"type", "transport"}, {"value", "play"}});
    std::vector<nlohmann::json> texts;
    std::uint64_t expect_index = 0;
    std::uint32_t expect_seq = 0;
    bool heard = false;
    for (int i = 0; i < 25; ++i) {
      const auto f = decode_frame(ws.read_binary(&texts));
      CHECK(f.sequence == expect_seq);
      CHECK(f.sample_index == expect_index);
      CHECK(f.frame_count() == 960);
      for (float v : f.samples) heard |= v != 0.0f;
      ++expect_seq;
      expect_index += 960;
    }
    CHECK(heard);
    CHECK(texts.empty());

    ws.send_raw("{nonsense");
    ws.send({{"type", "set"}, {"source", "ghost"}, {"path", "gain_db"}, {"value", 0}});
    std::vector<std::vector<std::uint8_t>> frames;
    const auto e1 = ws.read_text(&frames);
    CHECK(e1["type"] == "error");
    const auto e2 = ws.read_text(&frames);
    CHECK(e2["type"] == "error");
    CHECK(e2["message"].get<std::string>().find("ghost") != std::string::npos);
    // Connection kept and still gapless.
    for (const auto& raw : frames) {
      const auto f = decode_frame(raw);
      CHECK(f.sample_index == expect_index);
      expect_index += 960;
    }

    ws.send({{"type", "record"}, {"value", "start"}});
    for (int i = 0; i < 10; ++i) ws.read_binary();
    ws.send({{"type", "record"}, {"value", "stop"}});
    const auto rec = ws.read_text();
    REQUIRE(rec["type"] == "recording");
    const std::string url = rec["url"];
    CHECK(url == "/recordings/" + rec["id"].get<std::string>());
    auto res = fx.http->Get(url);
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto wav = audio::decode_wav(std::vector<std::uint8_t>(res->body.begin(), res->body.end()));
    CHECK(wav.channel_count() == 2);
    CHECK(wav.frames() == rec["frames"].get<std::size_t>());
    CHECK(wav.frames() >= 9 * 960);
  }
}
