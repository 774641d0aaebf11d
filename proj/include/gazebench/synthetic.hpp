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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazebench/types.hpp"

namespace gazebench {

struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Desk-scale stand-in for a reading-task gaze dataset: every subject gets its
/// own oculomotor parameters, drawn once and reused (lightly perturbed) for the
/// second session.
struct SyntheticSpec {
  int n_subjects = 60;
  double duration_s = 65.0;
  double sampling_rate_hz = 1000.0;
  ParameterRange saccade_rate_hz{1.0, 4.0};
  ParameterRange amplitude_scale{0.6, 1.6};        // multiplies a 5 deg mean amplitude
  ParameterRange main_sequence_ms_per_deg{1.8, 3.2};
  ParameterRange drift_sd{0.05, 0.6};              // deg / sqrt(s) random walk
  ParameterRange tremor_sd{0.002, 0.012};          // deg
  ParameterRange horizontal_fraction{0.55, 0.95};  // share of horizontal saccades
  ParameterRange profile_skew{0.75, 1.35};         // velocity-profile asymmetry
  ParameterRange blink_rate_hz{0.02, 0.3};
  double session_perturbation = 0.1;
  std::uint64_t seed = 7;
  std::string task = "TEX";

  /// Throws ArgumentError for n_subjects < 3 or a non-positive range.
  void check() const;
};

/// Parameters of one subject in one session.
struct SubjectParameters {
  double saccade_rate_hz;
  double amplitude_scale;
  double main_sequence_ms_per_deg;
  double drift_sd;
  double tremor_sd;
  double horizontal_fraction;
  double profile_skew;
  double blink_rate_hz;
};

SubjectParameters draw_subject(const SyntheticSpec& spec, const std::string& subject_id,
                               Session session);

GazeRecording simulate_recording(const SyntheticSpec& spec, const std::string& subject_id,
                                 Session session);

struct Dataset {
  DatasetManifest manifest;
  std::vector<GazeRecording> recordings;  // parallel to manifest.recordings
};

/// In-memory dataset with a manifest whose paths follow write_dataset().
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Writes `<dir>/manifest.json` and one recording CSV per manifest entry.
void write_dataset(const Dataset& d, const std::string& dir);

/// Loads every recording listed in the manifest.
Dataset load_dataset(const DatasetManifest& manifest);

}  // namespace gazebench
