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


#include "binscape/binaural/iir_fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <thread>

#include "binscape/error.hpp"

namespace binscape::binaural {
namespace {

constexpr double kMinQ = 0.2;
constexpr double kMaxQ = 16.0;
constexpr double kMaxSectionDb = 40.0;
constexpr int kMaxSweeps = 5000;

struct Bounds {
  double lo, hi;
};

double mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// |H|^2 of a biquad from cos(w) and cos(2w), avoiding complex arithmetic in
// the optimizer's inner loop.
std::vector<double> section_db(const PeakingSection& s, std::span<const double> freqs, double fs) {
  std::vector<double> out(freqs.size(), 0.0);
  if (s.gain_db == 0.0) return out;
  const auto c = fx::biquad_coeffs(fx::FilterKind::peaking, s.fc, s.q, s.gain_db, fs);
  const double n0 = c.b0 * c.b0 + c.b1 * c.b1 + c.b2 * c.b2;
  const double n1 = 2.0 * (c.b0 * c.b1 + c.b1 * c.b2);
  const double n2 = 2.0 * c.b0 * c.b2;
  const double d0 = 1.0 + c.a1 * c.a1 + c.a2 * c.a2;
  const double d1 = 2.0 * (c.a1 + c.a1 * c.a2);
  const double d2 = 2.0 * c.a2;
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * freqs[k] / fs;
    const double c1 = std::cos(w);
    const double c2 = std::cos(2.0 * w);
    out[k] = 10.0 * std::log10((n0 + n1 * c1 + n2 * c2) / (d0 + d1 * c1 + d2 * c2));
  }
  return out;
}

// Fit state with cached per-section responses so one coordinate move costs
// one section evaluation.
class Problem {
 public:
  Problem(std::span<const double> target, std::span<const double> freqs, double fs,
          std::vector<PeakingSection> sections)
      : target_(target), freqs_(freqs), fs_(fs), sections_(std::move(sections)) {
    for (const auto& s : sections_) cache_.push_back(section_db(s, freqs_, fs_));
  }

  const std::vector<PeakingSection>& sections() const { return sections_; }

  // Error with the broadband gain at its optimum (the mean residual).
  double error(std::size_t replaced = SIZE_MAX, const std::vector<double>* alt = nullptr,
               double* gain_out = nullptr) const {
    std::vector<double> resid(target_.begin(), target_.end());
    for (std::size_t s = 0; s < cache_.size(); ++s) {
      const auto& r = (s == replaced && alt) ? *alt : cache_[s];
      for (std::size_t k = 0; k < resid.size(); ++k) resid[k] -= r[k];
    }
    const double g = mean(resid);
    double acc = 0.0;
    for (double v : resid) acc += (v - g) * (v - g);
    if (gain_out) *gain_out = g;
    return std::sqrt(acc / static_cast<double>(resid.size()));
  }

  std::vector<double> evaluate(const PeakingSection& s) const { return section_db(s, freqs_, fs_); }

  void replace(std::size_t i, const PeakingSection& s, std::vector<double> resp) {
    sections_[i] = s;
    cache_[i] = std::move(resp);
  }

 private:
  std::span<const double> target_;
  std::span<const double> freqs_;
  double fs_;
  std::vector<PeakingSection> sections_;
  std::vector<std::vector<double>> cache_;
};

double q_from_octaves(double bw) {
  const double p = std::exp2(bw);
  return std::sqrt(p) / (p - 1.0);
}

std::vector<PeakingSection> initial_sections(std::span<const double> target,
                                             std::span<const double> freqs, std::size_t count,
                                             double fs) {
  const double m = mean(target);
  std::vector<double> r(target.size());
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = target[k] - m;

  std::vector<std::size_t> extrema;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double left = k > 0 ? r[k - 1] : r[k];
    const double right = k + 1 < r.size() ? r[k + 1] : r[k];
    const bool peak = r[k] > 0 && r[k] >= left && r[k] >= right;
    const bool dip = r[k] < 0 && r[k] <= left && r[k] <= right;
    if (peak || dip) extrema.push_back(k);
  }
  std::stable_sort(extrema.begin(), extrema.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(r[a]) > std::abs(r[b]); });

  const double fc_max = 0.45 * fs;
  std::vector<PeakingSection> sections;
  for (std::size_t e = 0; e < extrema.size() && sections.size() < count; ++e) {
    const std::size_t k = extrema[e];
    const double half = r[k] / 2.0;
    auto crosses = [&](std::size_t j) { return r[k] > 0 ? r[j] <= half : r[j] >= half; };
    std::size_t lo = k, hi = k;
    while (lo > 0 && !crosses(lo)) --lo;
    while (hi + 1 < r.size() && !crosses(hi)) ++hi;
    const double bw = std::max(std::log2(freqs[hi] / freqs[lo]), 0.1);
    sections.push_back({std::min(freqs[k], fc_max), std::clamp(q_from_octaves(bw), kMinQ, kMaxQ),
                        std::clamp(r[k], -kMaxSectionDb, kMaxSectionDb)});
  }
  // Unused sections start flat, spread over the band.
  for (std::size_t i = 0; sections.size() < count; ++i) {
    const double f = freqs.front() * std::pow(freqs.back() / freqs.front(),
                                              (i + 0.5) / static_cast<double>(count));
    sections.push_back({f, 1.0, 0.0});
  }
  return sections;
}

}  // namespace

double EarFit::linear_gain() const { return std::pow(10.0, gain_db / 20.0); }

std::vector<fx::BiquadCoeffs> EarFit::cascade(double fs) const {
  std::vector<fx::BiquadCoeffs> out;
  for (const auto& s : sections) {
    if (s.gain_db == 0.0) continue;
    out.push_back(fx::biquad_coeffs(fx::FilterKind::peaking, s.fc, s.q, s.gain_db, fs));
  }
  if (out.empty()) out.push_back({});
  const double g = linear_gain();
  out.front().b0 *= g;
  out.front().b1 *= g;
  out.front().b2 *= g;
  return out;
}

std::vector<double> fit_frequencies() {
  std::vector<double> f(kFitPoints);
  for (std::size_t k = 0; k < kFitPoints; ++k) {
    f[k] = kFitLowHz *
           std::pow(kFitHighHz / kFitLowHz, static_cast<double>(k) / (kFitPoints - 1));
  }
  return f;
}

std::vector<double> magnitude_db(std::span<const float> ir, std::span<const double> freqs,
                                 double fs) {
  std::vector<double> out(freqs.size());
  for (std::size_t k = 0; k < freqs.size(); ++k) {
    const double w = 2.0 * std::numbers::pi * freqs[k] / fs;
    std::complex<double> acc = 0.0;
    for (std::size_t n = 0; n < ir.size(); ++n) {
      acc += static_cast<double>(ir[n]) * std::polar(1.0, -w * static_cast<double>(n));
    }
    out[k] = std::max(20.0 * std::log10(std::abs(acc)), -120.0);
  }
  return out;
}

std::vector<double> fit_response_db(const EarFit& fit, std::span<const double> freqs, double fs) {
  std::vector<double> out(freqs.size(), fit.gain_db);
  for (const auto& s : fit.sections) {
    const auto r = section_db(s, freqs, fs);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += r[k];
  }
  return out;
}

double flat_fit_error(std::span<const double> target_db) {
  const double m = mean(target_db);
  double acc = 0.0;
  for (double v : target_db) acc += (v - m) * (v - m);
  return target_db.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(target_db.size()));
}

EarFit fit_magnitude(std::span<const double> target_db, std::span<const double> freqs, double fs,
                     int order) {
  if (order < 2 || order % 2 != 0) throw ParameterError("fit order must be a positive even number");
  const auto count = static_cast<std::size_t>(order / 2);

  EarFit flat;
  flat.gain_db = mean(target_db);
  flat.sections.assign(count, PeakingSection{1000.0, 1.0, 0.0});
  flat.error_db = flat_fit_error(target_db);

  auto init = initial_sections(target_db, freqs, count, fs);
  Problem problem(target_db, freqs, fs, init);
  double err = problem.error();
  if (!(err <= flat.error_db)) {
    for (auto& s : init) s.gain_db = 0.0;
    problem = Problem(target_db, freqs, fs, init);
    err = problem.error();
  }

  // Coordinates per section: log2 fc, log2 q, gain dB.
  const Bounds bounds[3] = {{std::log2(20.0), std::log2(0.45 * fs)},
                            {std::log2(kMinQ), std::log2(kMaxQ)},
                            {-kMaxSectionDb, kMaxSectionDb}};
  const double tolerance[3] = {1e-4, 1e-4, 1e-4};
  std::vector<double> step(count * 3);
  for (std::size_t i = 0; i < step.size(); ++i) step[i] = i % 3 == 2 ? 3.0 : 0.5;

  auto coord = [](const PeakingSection& s, std::size_t c) {
    return c == 0 ? std::log2(s.fc) : c == 1 ? std::log2(s.q) : s.gain_db;
  };
  auto with = [](PeakingSection s, std::size_t c, double v) {
    if (c == 0) s.fc = std::exp2(v);
    else if (c == 1) s.q = std::exp2(v);
    else s.gain_db = v;
    return s;
  };

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t i = 0; i < step.size(); ++i) {
      const std::size_t sec = i / 3;
      const std::size_t c = i % 3;
      if (step[i] < tolerance[c]) continue;
      converged = false;
      const PeakingSection cur = problem.sections()[sec];
      const double x = coord(cur, c);
      bool moved = false;
      for (double dir : {1.0, -1.0}) {
        const double v = std::clamp(x + dir * step[i], bounds[c].lo, bounds[c].hi);
        if (v == x) continue;
        const PeakingSection cand = with(cur, c, v);
        auto resp = problem.evaluate(cand);
        const double e = problem.error(sec, &resp);
        if (e < err) {
          problem.replace(sec, cand, std::move(resp));
          err = e;
          moved = true;
          break;
        }
      }
      step[i] *= moved ? 1.25 : 0.5;
    }
  }

  if (!converged || !std::isfinite(err)) {
    flat.converged = false;
    return flat;
  }
  EarFit fit;
  fit.sections = problem.sections();
  fit.error_db = problem.error(SIZE_MAX, nullptr, &fit.gain_db);
  return fit;
}

IirFitSet fit_iir_approximation(const HrirSet& set, int order) {
  if (order != 4 && order != 6 && order != 8) throw ParameterError("fit order must be 4, 6 or 8");
  check_hrir_set(set);
  IirFitSet out;
  out.order = order;
  out.sample_rate = set.sample_rate;
  out.grid = set.grid;
  out.directions.resize(set.size());

  const auto freqs = fit_frequencies();
  const double fs = set.sample_rate;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < set.size(); i = next++) {
      const auto tl = magnitude_db(set.left[i], freqs, fs);
      const auto tr = magnitude_db(set.right[i], freqs, fs);
      out.directions[i].left = fit_magnitude(tl, freqs, fs, order);
      out.directions[i].right = fit_magnitude(tr, freqs, fs, order);
    }
  };
  const unsigned threads = std::max(1u, std::min(std::thread::hardware_concurrency(), 16u));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (std::size_t i = 0; i < set.size(); ++i) {
    for (const auto* ear : {&out.directions[i].left, &out.directions[i].right}) {
      if (!ear->converged) {
        out.warnings.push_back("direction " + std::to_string(i) + " (" +
                               (ear == &out.directions[i].left ? "left" : "right") +
                               "): fit did not converge, using flat gain");
      }
    }
  }
  return out;
}

namespace {

nlohmann::json ear_json(const EarFit& e) {
  nlohmann::json sections = nlohmann::json::array();
  for (const auto& s : e.sections) {
    sections.push_back({{"fc", s.fc}, {"q", s.q}, {"gain_db", s.gain_db}});
  }
  return {{"gain_db", e.gain_db},
          {"sections", std::move(sections)},
          {"error_db", e.error_db},
          {"converged", e.converged}};
}

EarFit ear_from_json(const nlohmann::json& j) {
  EarFit e;
  e.gain_db = j.at("gain_db").get<double>();
  e.error_db = j.value("error_db", 0.0);
  e.converged = j.value("converged", true);
  for (const auto& s : j.at("sections")) {
    e.sections.push_back(
        {s.at("fc").get<double>(), s.at("q").get<double>(), s.at("gain_db").get<double>()});
  }
  return e;
}

}  // namespace

nlohmann::json to_json(const IirFitSet& fits) {
  nlohmann::json dirs = nlohmann::json::array();
  for (std::size_t i = 0; i < fits.directions.size(); ++i) {
    dirs.push_back({{"index", i},
                    {"azimuth", fits.grid[i].azimuth_deg},
                    {"elevation", fits.grid[i].elevation_deg},
                    {"left", ear_json(fits.directions[i].left)},
                    {"right", ear_json(fits.directions[i].right)}});
  }
  return {{"order", fits.order},
          {"sample_rate", fits.sample_rate},
          {"band_hz", {kFitLowHz, kFitHighHz}},
          {"directions", std::move(dirs)},
          {"warnings", fits.warnings}};
}

IirFitSet fits_from_json(const nlohmann::json& doc) {
  IirFitSet fits;
  try {
    fits.order = doc.at("order").get<int>();
    fits.sample_rate = doc.at("sample_rate").get<int>();
    for (const auto& d : doc.at("directions")) {
      fits.grid.push_back({d.at("azimuth").get<double>(), d.at("elevation").get<double>()});
      fits.directions.push_back({ear_from_json(d.at("left")), ear_from_json(d.at("right"))});
    }
    if (doc.contains("warnings")) fits.warnings = doc["warnings"].get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("", std::string("bad fit document: ") + e.what());
  }
  return fits;
}

}  // namespace binscape::binaural
