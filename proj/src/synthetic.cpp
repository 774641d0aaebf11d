// Copyright 2026 The gazebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gazebench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "gazebench/io.hpp"
#include "gazebench/manipulate.hpp"

namespace gazebench {
namespace {

constexpr std::uint64_t kSaltParameters = 0x706172616d73ULL;
constexpr std::uint64_t kSaltPerturbation = 0x7065727475ULL;
constexpr std::uint64_t kSaltEvents = 0x6576656e7473ULL;

// Saccade targets stay inside this box; drift may leave it, bounds clip.
constexpr double kSafeH = 20.0;
constexpr double kSafeUp = 9.0;
constexpr double kSafeDown = -16.0;

double draw_log_uniform(std::mt19937_64& gen, const ParameterRange& r) {
  std::uniform_real_distribution<double> u(std::log(r.lo), std::log(r.hi));
  return std::exp(u(gen));
}

double draw_uniform(std::mt19937_64& gen, const ParameterRange& r) {
  std::uniform_real_distribution<double> u(r.lo, r.hi);
  return u(gen);
}

double min_jerk(double tau) {
  const double t3 = tau * tau * tau;
  return t3 * (10.0 - 15.0 * tau + 6.0 * tau * tau);
}

bool inside_safe_box(double x, double y) {
  return std::abs(x) <= kSafeH && y <= kSafeUp && y >= kSafeDown;
}

}  // namespace

void SyntheticSpec::check() const {
  if (n_subjects < 3) throw ArgumentError("synthetic data needs at least 3 subjects");
  if (!(duration_s > 0.0) || !(sampling_rate_hz > 0.0))
    throw ArgumentError("duration and sampling rate must be positive");
  for (const auto* r : {&saccade_rate_hz, &amplitude_scale, &main_sequence_ms_per_deg, &drift_sd,
                        &tremor_sd, &horizontal_fraction, &profile_skew, &blink_rate_hz}) {
    if (!(r->lo > 0.0) || !(r->hi >= r->lo))
      throw ArgumentError("synthetic parameter ranges must be positive and ordered");
  }
  if (horizontal_fraction.hi > 1.0) throw ArgumentError("horizontal_fraction must be <= 1");
  if (!(session_perturbation >= 0.0 && session_perturbation <= 1.0))
    throw ArgumentError("session_perturbation must lie in [0, 1]");
}

SubjectParameters draw_subject(const SyntheticSpec& spec, const std::string& subject_id,
                               Session session) {
  std::mt19937_64 gen(stream_key(spec.seed, subject_id, Session::S1, kSaltParameters));
  SubjectParameters p{};
  p.saccade_rate_hz = draw_uniform(gen, spec.saccade_rate_hz);
  p.amplitude_scale = draw_uniform(gen, spec.amplitude_scale);
  p.main_sequence_ms_per_deg = draw_uniform(gen, spec.main_sequence_ms_per_deg);
  p.drift_sd = draw_log_uniform(gen, spec.drift_sd);
  p.tremor_sd = draw_log_uniform(gen, spec.tremor_sd);
  p.horizontal_fraction = draw_uniform(gen, spec.horizontal_fraction);
  p.profile_skew = draw_uniform(gen, spec.profile_skew);
  p.blink_rate_hz = draw_log_uniform(gen, spec.blink_rate_hz);
  if (session == Session::S1 || spec.session_perturbation == 0.0) return p;

  std::mt19937_64 pert(stream_key(spec.seed, subject_id, Session::S2, kSaltPerturbation));
  std::uniform_real_distribution<double> u(-spec.session_perturbation, spec.session_perturbation);
  for (double* field : {&p.saccade_rate_hz, &p.amplitude_scale, &p.main_sequence_ms_per_deg,
                        &p.drift_sd, &p.tremor_sd, &p.horizontal_fraction, &p.profile_skew,
                        &p.blink_rate_hz})
    *field *= 1.0 + u(pert);
  p.horizontal_fraction = std::clamp(p.horizontal_fraction, 0.0, 1.0);
  return p;
}

GazeRecording simulate_recording(const SyntheticSpec& spec, const std::string& subject_id,
                                 Session session) {
  const SubjectParameters p = draw_subject(spec, subject_id, session);
  std::mt19937_64 gen(stream_key(spec.seed, subject_id, session, kSaltEvents));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double fs = spec.sampling_rate_hz;
  const auto n = Eigen::Index(std::lround(spec.duration_s * fs));
  Eigen::ArrayXd h(n), v(n);

  double x = 16.0 * unit(gen) - 8.0;
  double y = 10.0 * unit(gen) - 6.0;
  // AR(1) tremor on top of the drifting eye position.
  constexpr double kTremorPhi = 0.6;
  const double tremor_innovation = p.tremor_sd * std::sqrt(1.0 - kTremorPhi * kTremorPhi);
  double tx = 0.0, ty = 0.0;
  const double drift_step = p.drift_sd / std::sqrt(fs);

  Eigen::Index i = 0;
  auto emit = [&](double px, double py) {
    tx = kTremorPhi * tx + tremor_innovation * normal(gen);
    ty = kTremorPhi * ty + tremor_innovation * normal(gen);
    h[i] = px + tx;
    v[i] = py + ty;
    ++i;
  };

  const double mean_interval = 1.0 / p.saccade_rate_hz;
  std::gamma_distribution<double> fixation_len(3.0, mean_interval / 3.0);
  std::gamma_distribution<double> amplitude(2.5, 2.0);

  while (i < n) {
    const double fix_s = std::max(0.06, fixation_len(gen));
    const auto nf = Eigen::Index(std::lround(fix_s * fs));
    for (Eigen::Index k = 0; k < nf && i < n; ++k) {
      x += drift_step * normal(gen);
      y += drift_step * normal(gen);
      emit(x, y);
    }
    if (unit(gen) < std::min(1.0, p.blink_rate_hz * fix_s)) {
      const auto nb = Eigen::Index(std::lround((0.08 + 0.17 * unit(gen)) * fs));
      for (Eigen::Index k = 0; k < nb && i < n; ++k, ++i) h[i] = v[i] = kMissing;
    }
    if (i >= n) break;

    const double amp = std::clamp(p.amplitude_scale * amplitude(gen), 0.3, 25.0);
    double angle;
    if (unit(gen) < p.horizontal_fraction)
      angle = (unit(gen) < 0.75 ? 0.0 : std::numbers::pi) + 0.1 * normal(gen);
    else
      angle = (unit(gen) < 0.5 ? 0.5 : -0.5) * std::numbers::pi + 0.1 * normal(gen);
    double gx = x + amp * std::cos(angle);
    double gy = y + amp * std::sin(angle);
    if (!inside_safe_box(gx, gy)) {
      gx = x - amp * std::cos(angle);
      gy = y - amp * std::sin(angle);
    }
    gx = std::clamp(gx, -kSafeH, kSafeH);
    gy = std::clamp(gy, kSafeDown, kSafeUp);

    const double duration_ms = 20.0 + p.main_sequence_ms_per_deg * amp;
    const auto ns = std::max<Eigen::Index>(3, std::lround(duration_ms * fs / 1000.0));
    const double x0 = x, y0 = y;
    for (Eigen::Index k = 1; k <= ns && i < n; ++k) {
      const double s = min_jerk(std::pow(double(k) / double(ns), p.profile_skew));
      x = x0 + (gx - x0) * s;
      y = y0 + (gy - y0) * s;
      emit(x, y);
    }
    x = gx;
    y = gy;
  }

  for (Eigen::Index k = 0; k < n; ++k) {
    if (is_missing(h[k])) continue;
    h[k] = std::clamp(h[k], -23.3, 23.3);
    v[k] = std::clamp(v[k], -18.5, 11.7);
  }
  return GazeRecording(subject_id, session, spec.task, fs, std::move(h), std::move(v));
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.check();
  Dataset d;
  d.manifest.dataset_name = "synthetic-seed" + std::to_string(spec.seed);
  const double stream_s = std::min(60.0, spec.duration_s);
  d.manifest.enrollment_selector = {Session::S1, spec.task, stream_s};
  d.manifest.authentication_selector = {Session::S2, spec.task, stream_s};
  for (int s = 0; s < spec.n_subjects; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "s%03d", s + 1);
    for (Session session : {Session::S1, Session::S2}) {
      d.manifest.recordings.push_back({std::string("recordings/") + id + "_" +
                                           std::string(to_string(session)) + ".csv",
                                       id, session, spec.task, spec.sampling_rate_hz});
      d.recordings.push_back(simulate_recording(spec, id, session));
    }
  }
  return d;
}

void write_dataset(const Dataset& d, const std::string& dir) {
  std::filesystem::create_directories(dir);
  DatasetManifest m = d.manifest;
  m.base_dir = dir;
  for (std::size_t i = 0; i < m.recordings.size(); ++i)
    write_recording(d.recordings[i], m.resolve(m.recordings[i]));
  write_manifest(m, (std::filesystem::path(dir) / "manifest.json").string());
}

Dataset load_dataset(const DatasetManifest& manifest) {
  manifest.check();
  Dataset d;
  d.manifest = manifest;
  d.recordings.reserve(manifest.recordings.size());
  for (const auto& e : manifest.recordings) d.recordings.push_back(load_recording(manifest.resolve(e), e));
  return d;
}

}  // namespace gazebench
