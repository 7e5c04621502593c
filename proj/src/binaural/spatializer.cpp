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


#include "binscape/binaural/spatializer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "binscape/error.hpp"

namespace binscape::binaural {
namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

double ramp(double from, double to, std::size_t n, std::size_t count) {
  if (from == to) return to;
  return from + (to - from) * static_cast<double>(n + 1) / static_cast<double>(count);
}

}  // namespace

SourcePose source_pose(double lx, double ly, double yaw, double sx, double sy, double elevation_m) {
  const double dx = sx - lx;
  const double dy = sy - ly;
  const double forward = -std::sin(yaw) * dx + std::cos(yaw) * dy;
  const double leftward = -std::cos(yaw) * dx - std::sin(yaw) * dy;
  const double horizontal = std::hypot(dx, dy);
  SourcePose p;
  p.azimuth = (forward == 0.0 && leftward == 0.0) ? 0.0 : std::atan2(leftward, forward);
  p.elevation = (horizontal == 0.0 && elevation_m == 0.0) ? 0.0 : std::atan2(elevation_m, horizontal);
  p.distance = std::hypot(horizontal, elevation_m);
  return p;
}

Spatializer::Spatializer(std::shared_ptr<const HrirSet> hrirs, double head_circumference,
                         SpatialMode mode, std::shared_ptr<const IirFitSet> fits)
    : hrirs_(std::move(hrirs)), fits_(std::move(fits)), circumference_(head_circumference),
      mode_(mode) {
  if (!hrirs_) throw ParameterError("spatializer needs an HRIR set");
  check_hrir_set(*hrirs_);
  if (mode_ == SpatialMode::high_performance) {
    if (!fits_) throw ParameterError("high-performance mode needs IIR fits");
    if (fits_->directions.size() != hrirs_->size()) {
      throw ParameterError("IIR fits do not match the HRIR grid");
    }
    if (fits_->sample_rate != hrirs_->sample_rate) {
      throw ParameterError("IIR fits were computed at a different sample rate");
    }
  }
  reset();
}

void Spatializer::reset() {
  primed_ = false;
  index_ = 0;
  gain_ = 1.0;
  air_state_ = 0.0;
  history_.assign(kMaxDelaySamples + 1, 0.0);
  for (auto& ear : ears_) {
    ear.tail.assign(hrirs_->length > 0 ? hrirs_->length - 1 : 0, 0.0);
    ear.cascade.clear();
    ear.shelf = {};
    ear.shelf_db = 0.0;
    ear.delay = 0.0;
  }
}

std::vector<fx::Biquad> Spatializer::make_cascade(std::size_t index, bool is_left) const {
  const auto& dir = fits_->directions[index];
  const auto coeffs = (is_left ? dir.left : dir.right).cascade(fits_->sample_rate);
  std::vector<fx::Biquad> out;
  for (const auto& c : coeffs) out.push_back(fx::Biquad{c});
  return out;
}

void Spatializer::convolve_ear(Ear& ear, std::span<const double> in,
                               const std::vector<float>& ir_new,
                               const std::vector<float>* ir_old, std::span<double> out) const {
  const std::size_t n = in.size();
  const std::size_t taps = ir_new.size();
  const std::size_t full = n + taps - 1;
  std::vector<double> conv_new(full, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = in[i];
    if (x == 0.0) continue;
    for (std::size_t k = 0; k < taps; ++k) conv_new[i + k] += x * ir_new[k];
  }
  std::vector<double> conv_old;
  if (ir_old) {
    conv_old.assign(full, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = in[i];
      if (x == 0.0) continue;
      for (std::size_t k = 0; k < taps; ++k) conv_old[i + k] += x * (*ir_old)[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double y = conv_new[i];
    if (ir_old) {
      const double w = static_cast<double>(i + 1) / static_cast<double>(n);
      y = w * conv_new[i] + (1.0 - w) * conv_old[i];
    }
    out[i] = (i < ear.tail.size() ? ear.tail[i] : 0.0) + y;
  }
  // Carry: the unconsumed old tail plus the new filter's spill past the block.
  std::vector<double> next(ear.tail.size(), 0.0);
  for (std::size_t j = 0; j < next.size(); ++j) {
    const std::size_t old_pos = j + n;
    if (old_pos < ear.tail.size()) next[j] += ear.tail[old_pos];
    if (n + j < full) next[j] += conv_new[n + j];
  }
  ear.tail = std::move(next);
}

void Spatializer::cascade_ear(Ear& ear, bool is_left, std::span<const double> in, bool changed,
                              std::span<double> out) const {
  if (ear.cascade.empty()) ear.cascade = make_cascade(index_, is_left);
  if (!changed) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      double y = in[i];
      for (auto& bq : ear.cascade) y = bq.process(y);
      out[i] = y;
    }
    return;
  }
  auto old_chain = ear.cascade;
  auto new_chain = make_cascade(index_, is_left);
  // Warm start: the new chain inherits the old filter memories section by
  // section so the crossfade does not expose a cold-start transient.
  for (std::size_t s = 0; s < std::min(old_chain.size(), new_chain.size()); ++s) {
    new_chain[s].z1 = old_chain[s].z1;
    new_chain[s].z2 = old_chain[s].z2;
  }
  const std::size_t n = in.size();
  for (std::size_t i = 0; i < n; ++i) {
    double a = in[i];
    double b = in[i];
    for (auto& bq : old_chain) a = bq.process(a);
    for (auto& bq : new_chain) b = bq.process(b);
    const double w = static_cast<double>(i + 1) / static_cast<double>(n);
    out[i] = w * b + (1.0 - w) * a;
  }
  ear.cascade = std::move(new_chain);
}

void Spatializer::process(std::span<const float> mono, const SourcePose& pose,
                          const DistanceModel& model, std::span<float> left,
                          std::span<float> right) {
  const std::size_t n = mono.size();
  if (left.size() != n || right.size() != n) {
    throw ParameterError("spatializer output spans must match the input length");
  }
  const double fs = hrirs_->sample_rate;
  const double d = std::max(pose.distance, 0.0);

  const double target_gain = distance_gain(d, model);
  const EarDelays delays = itd_delays(circumference_, pose.azimuth, pose.elevation);
  const double delay_target[2] = {std::min(delays.left_s * fs, double(kMaxDelaySamples - 1)),
                                  std::min(delays.right_s * fs, double(kMaxDelaySamples - 1))};
  const ShelfGains shelf = near_field_ild_gains(d, pose.azimuth, model);
  const double shelf_target[2] = {shelf.left_db, shelf.right_db};
  const std::size_t new_index = select_hrir(*hrirs_, pose.azimuth * kDeg, pose.elevation * kDeg);

  if (!primed_) {
    gain_ = target_gain;
    for (int e = 0; e < 2; ++e) ears_[e].delay = delay_target[e];
    index_ = new_index;
    primed_ = true;
  }
  const bool changed = new_index != index_;
  const std::size_t prev_index = index_;
  index_ = new_index;

  // Distance gain, then air absorption on the mono signal.
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = mono[i] * ramp(gain_, target_gain, i, n);
  gain_ = target_gain;

  if (d > model.far_field_distance) {
    const double a = std::exp(-2.0 * std::numbers::pi * air_absorption_cutoff(d, model) / fs);
    for (auto& v : x) {
      air_state_ = (1.0 - a) * v + a * air_state_;
      v = air_state_;
    }
  } else if (n > 0) {
    air_state_ = x.back();
  }

  // Delay line: history holds the previous inputs, oldest first.
  const std::size_t hist = history_.size();
  std::vector<double> line(hist + n);
  std::copy(history_.begin(), history_.end(), line.begin());
  std::copy(x.begin(), x.end(), line.begin() + static_cast<std::ptrdiff_t>(hist));
  std::copy(line.end() - static_cast<std::ptrdiff_t>(hist), line.end(), history_.begin());

  std::array<std::vector<double>, 2> delayed;
  for (int e = 0; e < 2; ++e) {
    auto& ear = ears_[e];
    delayed[e].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dl = ramp(ear.delay, delay_target[e], i, n);
      const auto whole = static_cast<std::size_t>(dl);
      const double frac = dl - static_cast<double>(whole);
      const std::size_t pos = hist + i - whole;
      delayed[e][i] = line[pos] * (1.0 - frac) + line[pos - 1] * frac;
    }
    ear.delay = delay_target[e];
  }

  std::array<std::vector<double>, 2> y;
  for (int e = 0; e < 2; ++e) {
    y[e].resize(n);
    const bool is_left = e == 0;
    if (mode_ == SpatialMode::full_hrir) {
      const auto& irs = is_left ? hrirs_->left : hrirs_->right;
      convolve_ear(ears_[e], delayed[e], irs[index_], changed ? &irs[prev_index] : nullptr, y[e]);
    } else {
      cascade_ear(ears_[e], is_left, delayed[e], changed, y[e]);
    }
  }

  for (int e = 0; e < 2; ++e) {
    auto& ear = ears_[e];
    auto out = e == 0 ? left : right;
    if (ear.shelf_db == 0.0 && shelf_target[e] == 0.0) {
      ear.shelf.reset();
      for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(y[e][i]);
      continue;
    }
    if (shelf_target[e] != ear.shelf_db) {
      ear.shelf.c = fx::biquad_coeffs(fx::FilterKind::highshelf, kNearFieldShelfHz,
                                      1.0 / std::numbers::sqrt2, shelf_target[e], fs);
    }
    ear.shelf_db = shelf_target[e];
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<float>(ear.shelf.process(y[e][i]));
  }
}

StereoBlock spatialize_block(Spatializer& state, std::span<const float> mono,
                             const SourcePose& pose, const DistanceModel& model) {
  StereoBlock out{std::vector<float>(mono.size()), std::vector<float>(mono.size())};
  state.process(mono, pose, model, out.left, out.right);
  return out;
}

}  // namespace binscape::binaural
