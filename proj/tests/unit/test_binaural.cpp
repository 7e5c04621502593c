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

#include <cmath>
#include <filesystem>
#include <numbers>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "binscape/binaural/cues.hpp"
#include "binscape/binaural/hrir_set.hpp"
#include "binscape/binaural/iir_fit.hpp"
#include "binscape/binaural/spatializer.hpp"
#include "binscape/error.hpp"
#include "support.hpp"

using namespace binscape;
using namespace binscape::binaural;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRad = kPi / 180.0;

std::shared_ptr<const HrirSet> shipped_set() {
  static const auto set = std::make_shared<const HrirSet>(
      load_hrir_set(std::filesystem::path(BINSCAPE_DATA_DIR) / "hrir" / "synthetic"));
  return set;
}

// Cookbook high shelf and peaking EQ, written out here so the oracles do not
// share code with the library.
struct Sos {
  long double b0, b1, b2, a1, a2;
};

Sos shelf_high(long double fc, long double q, long double db, long double fs) {
  const long double A = std::pow(10.0L, db / 40.0L);
  const long double w = 2.0L * std::numbers::pi_v<long double> * fc / fs;
  const long double al = std::sin(w) / (2.0L * q);
  const long double c = std::cos(w);
  const long double sa = 2.0L * std::sqrt(A) * al;
  const long double a0 = (A + 1) - (A - 1) * c + sa;
  return {A * ((A + 1) + (A - 1) * c + sa) / a0, -2 * A * ((A - 1) + (A + 1) * c) / a0,
          A * ((A + 1) + (A - 1) * c - sa) / a0, 2 * ((A - 1) - (A + 1) * c) / a0,
          ((A + 1) - (A - 1) * c - sa) / a0};
}

Sos peaking(long double fc, long double q, long double db, long double fs) {
  const long double A = std::pow(10.0L, db / 40.0L);
  const long double w = 2.0L * std::numbers::pi_v<long double> * fc / fs;
  const long double al = std::sin(w) / (2.0L * q);
  const long double c = std::cos(w);
  const long double a0 = 1 + al / A;
  return {(1 + al * A) / a0, -2 * c / a0, (1 - al * A) / a0, -2 * c / a0, (1 - al / A) / a0};
}

double sos_db(const Sos& s, double f, double fs) {
  const std::complex<long double> z1 = std::polar(1.0L, -2.0L * std::numbers::pi_v<long double> * f / fs);
  const auto z2 = z1 * z1;
  const auto h = (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0L + s.a1 * z1 + s.a2 * z2);
  return static_cast<double>(20.0L * std::log10(std::abs(h)));
}

std::vector<double> sos_impulse(const Sos& s, std::size_t n) {
  std::vector<double> h(n);
  long double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const long double x = i == 0 ? 1.0L : 0.0L;
    const long double y = s.b0 * x + s.b1 * x1 + s.b2 * x2 - s.a1 * y1 - s.a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    h[i] = static_cast<double>(y);
  }
  return h;
}

std::vector<double> as_double(std::span<const float> v) { return {v.begin(), v.end()}; }

// Renders `x` in blocks of `block` with a fixed pose.
StereoBlock render_static(Spatializer& sp, std::span<const float> x, const SourcePose& pose,
                          std::size_t block, const DistanceModel& m = {}) {
  StereoBlock out{std::vector<float>(x.size()), std::vector<float>(x.size())};
  for (std::size_t at = 0; at < x.size(); at += block) {
    const std::size_t n = std::min(block, x.size() - at);
    sp.process(x.subspan(at, n), pose, m, std::span(out.left).subspan(at, n),
               std::span(out.right).subspan(at, n));
  }
  return out;
}

// Whole composite response of one ear for a static pose, built from the
// documented chain: gain, air one-pole, fractional delay, HRIR, shelf.
std::vector<double> composite(const HrirSet& set, std::size_t index, bool left, double c,
                              const SourcePose& pose, const DistanceModel& m, std::size_t shelf_len) {
  const double fs = set.sample_rate;
  const double d = pose.distance;
  std::vector<double> h{std::pow(10.0, -m.attenuation_db_per_m * std::max(d - m.reference_distance, 0.0) / 20.0)};

  if (d > m.far_field_distance) {
    const double fc = std::max(1000.0, 20000.0 * std::pow(2.0, -(d - m.far_field_distance) / 15.0));
    const double a = std::exp(-2 * kPi * fc / fs);
    std::vector<double> air(4096);
    for (std::size_t k = 0; k < air.size(); ++k) air[k] = (1 - a) * std::pow(a, double(k));
    h = testsupport::direct_convolve(h, air);
  }

  const double r = c / (2 * kPi);
  const double lat = std::asin(std::sin(pose.azimuth) * std::cos(pose.elevation));
  const double itd = r / 343.0 * (std::abs(lat) + std::sin(std::abs(lat)));
  const bool far = left ? lat < 0 : lat > 0;
  if (far) {
    const double ds = itd * fs;
    const auto w = static_cast<std::size_t>(std::floor(ds));
    std::vector<double> del(w + 2, 0.0);
    del[w] = 1 - (ds - double(w));
    del[w + 1] = ds - double(w);
    h = testsupport::direct_convolve(h, del);
  }

  const auto& ir = left ? set.left[index] : set.right[index];
  h = testsupport::direct_convolve(h, as_double(ir));

  if (d < m.near_field_radius) {
    const double g = 6.0 * (1 - d / m.near_field_radius) * std::abs(std::sin(pose.azimuth));
    const bool near = left ? pose.azimuth > 0 : pose.azimuth < 0;
    if (g != 0) {
      const auto sh = sos_impulse(shelf_high(2000, 1 / std::sqrt(2.0L), near ? g : -g, fs), shelf_len);
      h = testsupport::direct_convolve(h, sh);
    }
  }
  return h;
}

}  // namespace

TEST_CASE("select_hrir examples") {
  HrirSet four = identity_hrir_set({{0, 0}, {90, 0}, {180, 0}, {270, 0}});
  CHECK(select_hrir(four, 100, 0) == 1);
  CHECK(select_hrir(four, 270, 0) == 3);
  CHECK(select_hrir(four, -90, 0) == 3);
  // Tie at 45 degrees goes to the lower index.
  CHECK(select_hrir(four, 45, 0) == 0);
  CHECK(select_hrir(four, 135, 0) == 1);

  HrirSet pole = identity_hrir_set({{0, 0}, {0, 90}, {180, -45}});
  for (double az : {0.0, 37.0, 180.0, 300.0}) CHECK(select_hrir(pole, az, 90) == 1);

  // Brute force over the shipped grid.
  const auto& set = *shipped_set();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ua(-180, 360), ue(-90, 90);
  for (int i = 0; i < 300; ++i) {
    const double az = ua(rng), el = ue(rng);
    double best = 1e9;
    std::size_t best_i = 0;
    for (std::size_t k = 0; k < set.size(); ++k) {
      const double a1 = az * kRad, e1 = el * kRad, a2 = set.grid[k].azimuth_deg * kRad,
                   e2 = set.grid[k].elevation_deg * kRad;
      const double c = std::sin(e1) * std::sin(e2) + std::cos(e1) * std::cos(e2) * std::cos(a1 - a2);
      const double ang = std::acos(std::clamp(c, -1.0, 1.0));
      if (ang < best - 1e-12) {
        best = ang;
        best_i = k;
      }
    }
    const auto got = select_hrir(set, az, el);
    const auto& g = set.grid[got];
    const double c = std::sin(el * kRad) * std::sin(g.elevation_deg * kRad) +
                     std::cos(el * kRad) * std::cos(g.elevation_deg * kRad) *
                         std::cos((az - g.azimuth_deg) * kRad);
    // Same index, or an exact tie in angle.
    CHECK((got == best_i || std::abs(std::acos(std::clamp(c, -1.0, 1.0)) - best) < 1e-9));
  }
}

TEST_CASE("itd examples") {
  const auto zero = itd_delays(0.55, 0, 0);
  CHECK(zero.left_s == 0);
  CHECK(zero.right_s == 0);

  using big = boost::multiprecision::cpp_bin_float_50;
  const big pi = boost::math::constants::pi<big>();
  const big expect = (big("0.55") / (2 * pi)) / 343 * (pi / 2 + 1);
  const auto left90 = itd_delays(0.55, kPi / 2, 0);
  CHECK(left90.left_s == 0);
  CHECK(std::abs(left90.right_s - static_cast<double>(expect)) <= 1e-9);
  CHECK(std::abs(left90.right_s - 6.56e-4) <= 1e-6);

  for (double az = 1; az < 180; az += 7) {
    const auto p = itd_delays(0.6, az * kRad, 0.3);
    const auto m = itd_delays(0.6, -az * kRad, 0.3);
    CHECK(p.left_s == m.right_s);
    CHECK(p.right_s == m.left_s);
  }
}

TEST_CASE("itd grows with the lateral angle") {
  double prev = -1;
  for (int deg = 0; deg <= 90; ++deg) {
    const auto d = itd_delays(0.55, deg * kRad, 0);
    CHECK(d.right_s >= prev);
    prev = d.right_s;
  }
  // Elevation shrinks the lateral angle.
  CHECK(itd_delays(0.55, kPi / 2, 0.5).right_s < itd_delays(0.55, kPi / 2, 0).right_s);
}

TEST_CASE("distance gain") {
  DistanceModel m;
  CHECK(distance_gain(1.0, m) == 1.0);
  CHECK(distance_gain(0.0, m) == 1.0);
  CHECK(distance_gain(0.4, m) == 1.0);
  CHECK(std::abs(distance_gain(3.0, m) - 0.50119) <= 1e-5);
  double prev = 2;
  for (double d = 0; d <= 50; d += 0.01) {
    const double g = distance_gain(d, m);
    CHECK(g <= prev);
    prev = g;
  }
  m.reference_distance = 0;
  CHECK_THROWS_AS(check_model(m), ParameterError);
}

TEST_CASE("air absorption cutoff") {
  DistanceModel m;
  CHECK(air_absorption_cutoff(0, m) == 20000);
  CHECK(air_absorption_cutoff(15, m) == 20000);
  CHECK(air_absorption_cutoff(30, m) == doctest::Approx(10000));
  CHECK(air_absorption_cutoff(10000, m) == 1000);
}

TEST_CASE("near-field ILD gains") {
  DistanceModel m;
  auto g = near_field_ild_gains(1.5, kPi / 2, m);
  CHECK(g.left_db == 0);
  CHECK(g.right_db == 0);
  g = near_field_ild_gains(0.3, 0, m);
  CHECK(g.left_db == 0);
  CHECK(g.right_db == 0);
  g = near_field_ild_gains(0.75, kPi / 2, m);
  CHECK(g.left_db == doctest::Approx(3));
  CHECK(g.right_db == doctest::Approx(-3));
  g = near_field_ild_gains(0.75, -kPi / 2, m);
  CHECK(g.left_db == doctest::Approx(-3));
  CHECK(g.right_db == doctest::Approx(3));
}

TEST_CASE("source_pose follows the yaw frame") {
  // Yaw 0 faces +y; a source at +x is to the right (negative azimuth).
  auto p = source_pose(0, 0, 0, 2, 0, 0);
  CHECK(p.azimuth == doctest::Approx(-kPi / 2));
  CHECK(p.distance == doctest::Approx(2));
  p = source_pose(1, 1, kPi / 2, 1, 3, 0);  // facing -x, source at +y: right
  CHECK(p.azimuth == doctest::Approx(-kPi / 2));
  p = source_pose(0, 0, 0, 0, 3, 4);
  CHECK(p.azimuth == doctest::Approx(0));
  CHECK(p.elevation == doctest::Approx(std::atan2(4.0, 3.0)));
  CHECK(p.distance == doctest::Approx(5));
}

TEST_CASE("zero input gives zero output") {
  Spatializer sp(shipped_set(), 0.55);
  const std::vector<float> z(128, 0.0f);
  for (int b = 0; b < 5; ++b) {
    const auto out = spatialize_block(sp, z, {0.3 * b, 0, 0.5 + b}, {});
    for (std::size_t i = 0; i < 128; ++i) {
      CHECK(out.left[i] == 0.0f);
      CHECK(out.right[i] == 0.0f);
    }
  }
}

TEST_CASE("identity HRIRs pass a unit impulse at the reference distance") {
  auto set = std::make_shared<const HrirSet>(identity_hrir_set({{0, 0}, {90, 0}, {270, 0}}));
  Spatializer sp(set, 0.55);
  std::vector<float> x(128, 0.0f);
  x[0] = 1.0f;
  const auto out = spatialize_block(sp, x, {0, 0, 1.0}, {});
  for (std::size_t i = 0; i < 128; ++i) {
    CHECK(out.left[i] == (i == 0 ? 1.0f : 0.0f));
    CHECK(out.right[i] == (i == 0 ? 1.0f : 0.0f));
  }
}

TEST_CASE("spatializer is linear") {
  const auto x = testsupport::noise(4096, 3);
  std::vector<float> x2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x2[i] = 0.25f * x[i];
  const SourcePose pose{0.7, 0.2, 0.9};
  Spatializer a(shipped_set(), 0.55), b(shipped_set(), 0.55);
  const auto ya = render_static(a, x, pose, 128);
  const auto yb = render_static(b, x2, pose, 128);
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    worst = std::max(worst, std::abs(0.25 * ya.left[i] - yb.left[i]));
    worst = std::max(worst, std::abs(0.25 * ya.right[i] - yb.right[i]));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("static pose matches one long convolution with the composite filter") {
  const auto set = shipped_set();
  const auto x = testsupport::noise(16000, 5);
  const double c = 0.55;
  DistanceModel m;
  struct Case {
    const char* name;
    SourcePose pose;
  };
  const Case cases[] = {
      {"mid field, left", {30 * kRad, 0, 2.0}},
      {"mid field, right, elevated", {-100 * kRad, 25 * kRad, 3.5}},
      {"far field with air absorption", {60 * kRad, 0, 20.0}},
      {"near field with shelves", {-70 * kRad, 0, 0.6}},
  };
  for (const auto& cs : cases) {
    CAPTURE(cs.name);
    Spatializer sp(set, c);
    const auto out = render_static(sp, x, cs.pose, 128, m);
    const auto idx = select_hrir(*set, cs.pose.azimuth / kRad, cs.pose.elevation / kRad);
    for (bool left : {true, false}) {
      const auto h = composite(*set, idx, left, c, cs.pose, m, 2048);
      const auto ref = testsupport::direct_convolve(as_double(x), h);
      const auto& got = left ? out.left : out.right;
      double worst = 0;
      for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - ref[i]));
      CHECK(worst <= 1e-5);
    }
  }
}

TEST_CASE("blockwise render equals whole-signal render") {
  const auto x = testsupport::noise(9000, 6);
  const SourcePose pose{-40 * kRad, 10 * kRad, 1.2};
  Spatializer whole(shipped_set(), 0.55);
  const auto ref = render_static(whole, x, pose, x.size());
  for (std::size_t block : {1u, 7u, 64u, 128u, 1000u}) {
    Spatializer sp(shipped_set(), 0.55);
    const auto out = render_static(sp, x, pose, block);
    double worst = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(double(out.left[i]) - ref.left[i]));
      worst = std::max(worst, std::abs(double(out.right[i]) - ref.right[i]));
    }
    CAPTURE(block);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("mirrored azimuth swaps channels bit-exactly") {
  const auto x = testsupport::noise(128 * 40, 7);
  for (double az : {10.0, 60.0, 95.0, 150.0}) {
    Spatializer a(shipped_set(), 0.55), b(shipped_set(), 0.55);
    StereoBlock ya{std::vector<float>(x.size()), std::vector<float>(x.size())};
    StereoBlock yb = ya;
    for (std::size_t blk = 0; blk < 40; ++blk) {
      // Moving source, so the crossfade path is mirrored as well.
      const double deg = az + double(blk);
      const SourcePose p{deg * kRad, 0.1, 0.5 + 0.05 * double(blk)};
      const SourcePose q{-deg * kRad, 0.1, 0.5 + 0.05 * double(blk)};
      const auto s = std::span(x).subspan(blk * 128, 128);
      a.process(s, p, {}, std::span(ya.left).subspan(blk * 128, 128), std::span(ya.right).subspan(blk * 128, 128));
      b.process(s, q, {}, std::span(yb.left).subspan(blk * 128, 128), std::span(yb.right).subspan(blk * 128, 128));
    }
    CHECK(ya.left == yb.right);
    CHECK(ya.right == yb.left);
  }
}

TEST_CASE("left source is louder on the left") {
  const auto x = testsupport::noise(48000, 8);
  Spatializer sp(shipped_set(), 0.55);
  const auto y = render_static(sp, x, {kPi / 2, 0, 2}, 128);
  CHECK(testsupport::rms(y.left) > 2 * testsupport::rms(y.right));
}

TEST_CASE("crossfade keeps block seams click-free") {
  // 200 Hz sine; the source steps one grid position (5 degrees) per block.
  std::vector<float> x(128 * 72);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = float(0.8 * std::sin(2 * kPi * 200 * double(i) / 48000));
  Spatializer sp(shipped_set(), 0.55);
  StereoBlock y{std::vector<float>(x.size()), std::vector<float>(x.size())};
  for (std::size_t b = 0; b < 72; ++b) {
    const SourcePose p{double(b) * 5 * kRad, 0, 2};
    sp.process(std::span(x).subspan(b * 128, 128), p, {}, std::span(y.left).subspan(b * 128, 128),
               std::span(y.right).subspan(b * 128, 128));
  }
  for (const auto* ch : {&y.left, &y.right}) {
    for (std::size_t b = 2; b < 72; ++b) {
      const std::size_t seam = b * 128;
      double within = 0;
      for (std::size_t i = seam + 1; i < seam + 128; ++i) within = std::max(within, double(std::abs((*ch)[i] - (*ch)[i - 1])));
      for (std::size_t i = seam - 127; i < seam; ++i) within = std::max(within, double(std::abs((*ch)[i] - (*ch)[i - 1])));
      const double jump = std::abs((*ch)[seam] - (*ch)[seam - 1]);
      CAPTURE(b);
      CHECK(jump <= 2 * within);
    }
  }
}

TEST_CASE("high-performance mode") {
  // A reduced grid keeps the fit quick.
  HrirSet small;
  const auto& full = *shipped_set();
  small.name = "subset";
  small.sample_rate = full.sample_rate;
  small.length = full.length;
  for (std::size_t i = 0; i < full.size(); ++i) {
    if (full.grid[i].elevation_deg != 0 || std::fmod(full.grid[i].azimuth_deg, 45.0) != 0) continue;
    small.grid.push_back(full.grid[i]);
    small.left.push_back(full.left[i]);
    small.right.push_back(full.right[i]);
  }
  auto set = std::make_shared<const HrirSet>(small);
  auto fits = std::make_shared<const IirFitSet>(fit_iir_approximation(*set, 6));
  REQUIRE(fits->directions.size() == set->size());

  CHECK_THROWS_AS(Spatializer(set, 0.55, SpatialMode::high_performance), ParameterError);
  Spatializer sp(set, 0.55, SpatialMode::high_performance, fits);
  CHECK(sp.mode() == SpatialMode::high_performance);

  const auto x = testsupport::noise(48000, 9);
  const auto y = render_static(sp, x, {kPi / 2, 0, 2}, 128);
  CHECK(testsupport::rms(y.left) > testsupport::rms(y.right));
  for (float v : y.left) CHECK(std::isfinite(v));

  // The right ear still carries the Woodworth delay: its cross-correlation
  // with the left ear peaks near the ITD.
  const double itd = itd_delays(0.55, kPi / 2, 0).right_s * 48000;
  double best = -1;
  int best_lag = 0;
  for (int lag = 0; lag < 60; ++lag) {
    double acc = 0;
    for (std::size_t i = 1000; i + 60 < y.left.size(); ++i) acc += double(y.left[i]) * y.right[i + std::size_t(lag)];
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  CHECK(std::abs(best_lag - itd) <= 3);

  // Mirror symmetry holds for the cascade path too.
  Spatializer a(set, 0.55, SpatialMode::high_performance, fits);
  Spatializer b(set, 0.55, SpatialMode::high_performance, fits);
  const auto ya = render_static(a, std::span(x).first(4096), {45 * kRad, 0, 1}, 128);
  const auto yb = render_static(b, std::span(x).first(4096), {-45 * kRad, 0, 1}, 128);
  CHECK(ya.left == yb.right);
}

TEST_CASE("HRIR set package round-trip and validation") {
  const auto dir = std::filesystem::temp_directory_path() / "binscape_hrir_rt";
  std::filesystem::remove_all(dir);
  const auto set = synthetic_hrir_set(44100, 32, 0.5);
  save_hrir_set(set, dir);
  CHECK(std::filesystem::exists(dir / "index.json"));
  CHECK(std::filesystem::exists(dir / hrir_filename(set.grid[3])));
  CHECK(load_hrir_set(dir) == set);
  std::filesystem::remove_all(dir);

  CHECK_THROWS(load_hrir_set(dir));
  HrirSet bad = set;
  bad.left[2].pop_back();
  CHECK_THROWS_AS(check_hrir_set(bad), ParameterError);
  bad = set;
  bad.grid[0].azimuth_deg = 360;
  CHECK_THROWS_AS(check_hrir_set(bad), ParameterError);
  bad = set;
  bad.grid.clear();
  bad.left.clear();
  bad.right.clear();
  CHECK_THROWS_AS(check_hrir_set(bad), ParameterError);
}

TEST_CASE("shipped set is the synthetic generator's output and symmetric") {
  const auto& set = *shipped_set();
  CHECK(set == synthetic_hrir_set());
  CHECK(set.size() == 216);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& d = set.grid[i];
    const double mirror = d.azimuth_deg == 0 ? 0 : 360 - d.azimuth_deg;
    const auto j = select_hrir(set, mirror, d.elevation_deg);
    CHECK(set.left[i] == set.right[j]);
  }
}

TEST_CASE("HRIR resampling keeps the grid") {
  const auto set = synthetic_hrir_set(44100, 64);
  const auto up = resample_hrir_set(set, 48000);
  CHECK(up.sample_rate == 48000);
  CHECK(up.grid == set.grid);
  CHECK(up.length == 70);  // ceil(64 * 48000 / 44100)
  CHECK_NOTHROW(check_hrir_set(up));
}

TEST_CASE("IIR fit of a flat target is a pure gain") {
  const auto freqs = fit_frequencies();
  REQUIRE(freqs.size() == kFitPoints);
  CHECK(freqs.front() == doctest::Approx(kFitLowHz));
  CHECK(freqs.back() == doctest::Approx(kFitHighHz));
  std::vector<float> ir(32, 0.0f);
  ir[0] = 0.3f;
  const auto target = magnitude_db(ir, freqs, 48000);
  const auto fit = fit_magnitude(target, freqs, 48000, 6);
  CHECK(fit.error_db < 0.5);
  CHECK(fit.converged);
  CHECK(fit.gain_db == doctest::Approx(20 * std::log10(0.3)).epsilon(1e-3));
  for (const auto& s : fit.sections) CHECK(std::abs(s.gain_db) < 0.1);
}

TEST_CASE("IIR fit recovers a single peaking resonance") {
  const auto freqs = fit_frequencies();
  const auto pk = peaking(3000, 2, 6, 48000);
  std::vector<double> target;
  for (double f : freqs) target.push_back(sos_db(pk, f, 48000));
  for (int order : {4, 6, 8}) {
    const auto fit = fit_magnitude(target, freqs, 48000, order);
    CAPTURE(order);
    CHECK(fit.sections.size() == std::size_t(order / 2));
    CHECK(fit.error_db < 1.0);
    CHECK(fit.error_db <= flat_fit_error(target));
    // Reported error agrees with the model response.
    const auto model_db = fit_response_db(fit, freqs, 48000);
    double acc = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) acc += (model_db[i] - target[i]) * (model_db[i] - target[i]);
    CHECK(std::sqrt(acc / double(freqs.size())) == doctest::Approx(fit.error_db).epsilon(1e-6));
    // The realised cascade reproduces the model.
    const auto cascade = fit.cascade(48000);
    for (std::size_t i = 0; i < freqs.size(); i += 9) {
      double db = 0;
      for (const auto& c : cascade) db += 20 * std::log10(std::abs(fx::response(c, freqs[i], 48000)));
      CHECK(db == doctest::Approx(model_db[i]).epsilon(1e-6));
    }
  }
}

TEST_CASE("IIR fits never lose to the best pure gain") {
  HrirSet small;
  const auto& full = *shipped_set();
  small.sample_rate = full.sample_rate;
  small.length = full.length;
  for (std::size_t i = 0; i < full.size(); i += 9) {
    small.grid.push_back(full.grid[i]);
    small.left.push_back(full.left[i]);
    small.right.push_back(full.right[i]);
  }
  const auto fits = fit_iir_approximation(small, 4);
  const auto freqs = fit_frequencies();
  for (std::size_t i = 0; i < small.size(); ++i) {
    const auto tl = magnitude_db(small.left[i], freqs, small.sample_rate);
    const auto tr = magnitude_db(small.right[i], freqs, small.sample_rate);
    CHECK(fits.directions[i].left.error_db <= flat_fit_error(tl) + 1e-12);
    CHECK(fits.directions[i].right.error_db <= flat_fit_error(tr) + 1e-12);
  }
  const auto back = fits_from_json(to_json(fits));
  CHECK(back.order == 4);
  CHECK(back.grid == fits.grid);
  CHECK(back.directions.size() == fits.directions.size());
  CHECK(back.directions[3].left.sections.size() == 2);
  CHECK_THROWS_AS(fit_iir_approximation(small, 5), ParameterError);
}
