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


// binscape: validate, render, sample, embed, fit-hrir and serve.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure, 3 I/O failure.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "binscape/audio/wav.hpp"
#include "binscape/binaural/hrir_set.hpp"
#include "binscape/binaural/iir_fit.hpp"
#include "binscape/engine/engine.hpp"
#include "binscape/error.hpp"
#include "binscape/fx/effects.hpp"
#include "binscape/model/embed.hpp"
#include "binscape/model/serialize.hpp"
#include "binscape/model/validate.hpp"
#include "binscape/service/server.hpp"
#include "binscape/traj/trajectory.hpp"

namespace fs = std::filesystem;
using namespace binscape;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct ExitError {
  int code;
  std::string message;
};

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_text(const fs::path& p) {
  const auto b = read_bytes(p);
  return {b.begin(), b.end()};
}

void check_overwrite(const fs::path& out, bool force) {
  if (fs::exists(out) && !force) {
    throw ExitError{kExitIo, out.string() + " exists; pass --force to overwrite"};
  }
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(reinterpret_cast<const char*>(bytes.data()),
                         static_cast<std::streamsize>(bytes.size()))) {
    throw IoError("cannot write " + p.string());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  write_bytes(p, std::vector<std::uint8_t>(text.begin(), text.end()));
}

bool is_url(const std::string& s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

std::vector<std::uint8_t> http_get(const std::string& url) {
  if (url.rfind("https://", 0) == 0) throw IoError("https is not supported: " + url);
  const auto slash = url.find('/', 7);
  const std::string host = url.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url.substr(slash);
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  auto res = client.Get(path);
  if (!res) throw IoError("request failed: " + url + " (" + httplib::to_string(res.error()) + ")");
  if (res->status != 200) throw IoError("GET " + url + " returned " + std::to_string(res->status));
  return {res->body.begin(), res->body.end()};
}

// Resolves asset uris against a directory or a URL base. Absolute URLs are
// fetched as given. In directory mode "/assets/{id}" also finds a service
// data directory's "assets/{id}.wav".
model::Resolver make_resolver(const std::string& base) {
  if (is_url(base)) {
    std::string root = base;
    while (!root.empty() && root.back() == '/') root.pop_back();
    return [root](const std::string& uri) {
      if (is_url(uri)) return http_get(uri);
      return http_get(root + (uri.rfind('/', 0) == 0 ? "" : "/") + uri);
    };
  }
  const fs::path dir = base;
  return [dir](const std::string& uri) {
    if (is_url(uri)) return http_get(uri);
    fs::path rel = uri.rfind('/', 0) == 0 ? fs::path(uri.substr(1)) : fs::path(uri);
    for (const auto& candidate : {dir / rel, dir / (rel.string() + ".wav")}) {
      if (fs::is_regular_file(candidate)) return read_bytes(candidate);
    }
    throw IoError("asset not found: " + (dir / rel).string());
  };
}

std::shared_ptr<const binaural::HrirSet> load_hrirs(const std::string& dir) {
  if (dir.empty()) return std::make_shared<const binaural::HrirSet>(binaural::synthetic_hrir_set());
  return std::make_shared<const binaural::HrirSet>(binaural::load_hrir_set(dir));
}

audio::SampleDepth parse_depth(const std::string& d) {
  return d == "pcm16" ? audio::SampleDepth::pcm16 : audio::SampleDepth::float32;
}

model::Deserialized load_scene(const fs::path& p) {
  return model::deserialize(read_text(p));
}

void print_report(const model::ValidationReport& report) {
  for (const auto& i : report.issues) {
    std::cout << (i.severity == model::Severity::error ? "error  " : "warning") << " "
              << (i.path.empty() ? "/" : i.path) << ": " << i.message << "\n";
  }
  std::cout << report.error_count() << " error(s), " << report.warning_count() << " warning(s)\n";
}

int cmd_validate(const std::string& in, bool as_json) {
  model::Deserialized doc;
  try {
    doc = load_scene(in);
  } catch (const ParseError& e) {
    if (as_json) {
      std::cout << nlohmann::json{{"ok", false},
                                  {"issues", {{{"severity", "error"},
                                               {"path", e.path()},
                                               {"message", e.what()}}}}}
                       .dump(2)
                << "\n";
    } else {
      std::cout << "error   " << (e.path().empty() ? "/" : e.path()) << ": " << e.what() << "\n";
    }
    return kExitInvalid;
  }
  auto report = model::validate(doc.soundscape);
  report.issues.insert(report.issues.end(), doc.warnings.begin(), doc.warnings.end());
  if (as_json) {
    std::cout << model::to_json(report).dump(2) << "\n";
  } else {
    print_report(report);
  }
  return report.ok() ? kExitOk : kExitInvalid;
}

model::Soundscape checked_scene(const std::string& path) {
  const auto doc = load_scene(path);
  const auto report = model::validate(doc.soundscape);
  if (!report.ok()) {
    print_report(report);
    throw ExitError{kExitInvalid, path + " failed validation"};
  }
  return doc.soundscape;
}

struct RenderArgs {
  std::string scene, trajectory, out, depth = "float32", hrir, assets, mode = "full", fits;
  bool force = false;
};

int cmd_render(const RenderArgs& a) {
  check_overwrite(a.out, a.force);
  const auto scape = checked_scene(a.scene);
  const auto traj = traj::trajectory_from_json(model::parse_json(read_text(a.trajectory)));
  const std::string base =
      a.assets.empty() ? fs::path(a.scene).parent_path().string() : a.assets;
  const auto assets = engine::load_assets(scape, make_resolver(base.empty() ? "." : base));
  engine::EngineOptions options;
  if (a.mode == "hp") {
    options.mode = binaural::SpatialMode::high_performance;
    if (a.fits.empty()) throw ExitError{kExitUsage, "--mode hp needs --fits"};
    options.fits = std::make_shared<const binaural::IirFitSet>(
        binaural::fits_from_json(model::parse_json(read_text(a.fits))));
  }
  const auto out = traj::render_offline(scape, traj, assets, load_hrirs(a.hrir), options);
  write_bytes(a.out, audio::encode_wav(out, parse_depth(a.depth)));
  std::cout << "wrote " << a.out << " (" << out.frames() << " frames, " << out.duration()
            << " s)\n";
  return kExitOk;
}

int cmd_sample(const std::string& in, const std::string& effects, const std::string& out,
               const std::string& depth, bool force) {
  check_overwrite(out, force);
  const auto input = audio::decode_wav(read_bytes(in));
  const fs::path fx_dir = fs::path(effects).parent_path();
  const auto doc = model::parse_json(read_text(effects));
  const auto specs = fx::parse_effects(doc, [&](const std::string& ref) {
    return audio::decode_wav(read_bytes(fs::path(ref).is_absolute() ? fs::path(ref) : fx_dir / ref));
  });
  const auto result = fx::render_chain(input, specs);
  write_bytes(out, audio::encode_wav(result, parse_depth(depth)));
  std::cout << "wrote " << out << " (" << specs.size() << " effect(s), " << result.frames()
            << " frames)\n";
  return kExitOk;
}

int cmd_embed(const std::string& in, const std::string& assets, const std::string& out,
              bool force) {
  check_overwrite(out, force);
  const auto doc = load_scene(in);
  const auto embedded = model::embed_assets(doc.soundscape, make_resolver(assets));
  write_text(out, model::serialize(embedded) + "\n");
  std::cout << "wrote " << out << " (" << embedded.sources.size() << " source(s) embedded)\n";
  return kExitOk;
}

int cmd_fit(const std::string& in, int order, const std::string& out, bool force) {
  check_overwrite(out, force);
  const auto set = in == "synthetic" ? binaural::synthetic_hrir_set() : binaural::load_hrir_set(in);
  const auto fits = binaural::fit_iir_approximation(set, order);
  std::printf("%6s %8s %8s %10s %10s\n", "index", "az", "el", "left_dB", "right_dB");
  double worst = 0.0;
  for (std::size_t i = 0; i < fits.directions.size(); ++i) {
    const auto& d = fits.directions[i];
    std::printf("%6zu %8.1f %8.1f %10.4f %10.4f\n", i, fits.grid[i].azimuth_deg,
                fits.grid[i].elevation_deg, d.left.error_db, d.right.error_db);
    worst = std::max({worst, d.left.error_db, d.right.error_db});
  }
  for (const auto& w : fits.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("worst RMS error %.4f dB over %zu directions\n", worst, fits.directions.size());
  write_text(out, binaural::to_json(fits).dump(1) + "\n");
  return kExitOk;
}

int cmd_serve(service::ServiceConfig cfg) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  service::Server server(std::move(cfg));
  server.start();
  std::cout << "listening on port " << server.port() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  return kExitOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const UnsupportedCodecError*>(&e) ||
      dynamic_cast<const TruncatedError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
    return kExitIo;
  }
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binaural soundscape toolkit"};
  app.require_subcommand(1);

  std::string validate_in;
  bool validate_json = false;
  auto* validate = app.add_subcommand("validate", "check a soundscape document");
  validate->add_option("scape", validate_in, "soundscape JSON")->required();
  validate->add_flag("--json", validate_json, "print the report as JSON");

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "render a trajectory offline to WAV");
  render->add_option("--scene", ra.scene, "soundscape JSON")->required();
  render->add_option("--trajectory", ra.trajectory, "trajectory JSON")->required();
  render->add_option("--out", ra.out, "output WAV")->required();
  render->add_option("--depth", ra.depth, "pcm16 or float32")
      ->check(CLI::IsMember({"pcm16", "float32"}));
  render->add_option("--hrir", ra.hrir, "HRIR set directory (default: built-in synthetic)");
  render->add_option("--assets", ra.assets, "asset directory or URL base (default: scene dir)");
  render->add_option("--mode", ra.mode, "full or hp")->check(CLI::IsMember({"full", "hp"}));
  render->add_option("--fits", ra.fits, "fits JSON for --mode hp");
  render->add_flag("--force", ra.force, "overwrite the output");

  std::string s_in, s_fx, s_out, s_depth = "float32";
  bool s_force = false;
  auto* sample = app.add_subcommand("sample", "apply an effects chain to a WAV");
  sample->add_option("--in", s_in, "input WAV")->required();
  sample->add_option("--effects", s_fx, "effects JSON")->required();
  sample->add_option("--out", s_out, "output WAV")->required();
  sample->add_option("--depth", s_depth, "pcm16 or float32")
      ->check(CLI::IsMember({"pcm16", "float32"}));
  sample->add_flag("--force", s_force, "overwrite the output");

  std::string e_in, e_assets, e_out;
  bool e_force = false;
  auto* embed = app.add_subcommand("embed", "inline every asset into the document");
  embed->add_option("--in", e_in, "soundscape JSON")->required();
  embed->add_option("--assets", e_assets, "asset directory or URL base")->required();
  embed->add_option("--out", e_out, "output JSON")->required();
  embed->add_flag("--force", e_force, "overwrite the output");

  std::string f_in, f_out;
  int f_order = 6;
  bool f_force = false;
  auto* fit = app.add_subcommand("fit-hrir", "fit IIR approximations for high-performance mode");
  fit->add_option("--in", f_in, "HRIR set directory, or 'synthetic'")->required();
  fit->add_option("--order", f_order, "4, 6 or 8")->check(CLI::IsMember({4, 6, 8}));
  fit->add_option("--out", f_out, "output fits JSON")->required();
  fit->add_flag("--force", f_force, "overwrite the output");

  auto cfg = service::ServiceConfig::from_env();
  std::string data_dir = cfg.data_dir.string(), hrir_dir = cfg.hrir_dir.string();
  auto* serve = app.add_subcommand("serve", "run the HTTP and live-session service");
  serve->add_option("--port", cfg.port, "listen port (env PORT)");
  serve->add_option("--data", data_dir, "storage directory (env DATA_DIR)");
  serve->add_option("--hrir", hrir_dir, "HRIR set directory (env HRIR_DIR)");
  serve->add_option("--address", cfg.address, "bind address");
  serve->add_option("--threads", cfg.threads, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(validate_in, validate_json);
    if (*render) return cmd_render(ra);
    if (*sample) return cmd_sample(s_in, s_fx, s_out, s_depth, s_force);
    if (*embed) return cmd_embed(e_in, e_assets, e_out, e_force);
    if (*fit) return cmd_fit(f_in, f_order, f_out, f_force);
    if (*serve) {
      cfg.data_dir = data_dir;
      cfg.hrir_dir = hrir_dir;
      return cmd_serve(cfg);
    }
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}
