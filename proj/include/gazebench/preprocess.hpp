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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gazebench/types.hpp"

namespace gazebench {

struct PreprocessConfig {
  std::pair<double, double> h_bounds{-23.3, 23.3};
  std::pair<double, double> v_bounds{-18.5, 11.7};
  int sg_window = 7;
  int sg_polyorder = 2;
  double clamp_deg_per_s = 1000.0;
  double sequence_duration_s = 5.0;
  int sequences_per_stream = 12;

  /// Throws ArgumentError when a field is out of range.
  void check() const;
};

struct NormalizationStats {
  double mean = 0.0;
  double sd = 1.0;
};

/// Least-squares Savitzky-Golay weights for the `deriv`-th derivative at the
/// window centre, unit sample spacing. Output[t] = sum_k w[k] * x[t - half + k].
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> savgol_weights(int window, int polyorder, int deriv) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int half = window / 2;
  Mat vander(window, polyorder + 1);
  for (int i = 0; i < window; ++i) {
    Scalar t = Scalar(i - half);
    Scalar p = Scalar(1);
    for (int j = 0; j <= polyorder; ++j, p *= t) vander(i, j) = p;
  }
  // Row `deriv` of the pseudo-inverse gives the coefficient of t^deriv.
  Mat pinv = vander.colPivHouseholderQr().solve(Mat::Identity(window, window));
  Scalar factorial = Scalar(1);
  for (int k = 2; k <= deriv; ++k) factorial *= Scalar(k);
  return factorial * pinv.row(deriv).transpose();
}

GazeRecording apply_gaze_bounds(const GazeRecording& r, const PreprocessConfig& cfg);

/// First-derivative Savitzky-Golay velocity in deg/s, same length as the
/// input. Edges use odd (point) reflection about the end samples; any window
/// touching a missing sample yields a missing output.
Sequence sg_velocity(const GazeRecording& r, const PreprocessConfig& cfg);

/// Non-overlapping windows of floor(duration * rate) samples, capped at
/// cfg.sequences_per_stream. Trailing remainder is dropped.
std::vector<Sequence> segment_sequences(const Sequence& velocity, double sampling_rate_hz,
                                        const PreprocessConfig& cfg);

std::vector<Sequence> clamp_velocity(std::vector<Sequence> seqs, const PreprocessConfig& cfg);

/// Pooled mean and population SD over every valid value of every sequence.
NormalizationStats fit_normalization(std::span<const Sequence> seqs);
NormalizationStats fit_normalization(std::span<const std::vector<Sequence>> corpus);

SequenceBatch normalize_and_fill(const std::vector<Sequence>& seqs, const NormalizationStats& stats,
                                 const std::string& subject_id, Session session,
                                 double sequence_duration_s);

/// bounds -> velocity -> segment -> clamp, before normalization.
std::vector<Sequence> velocity_sequences(const GazeRecording& r, const PreprocessConfig& cfg);

struct PreprocessedCorpus {
  std::vector<SequenceBatch> batches;
  NormalizationStats stats;
};

/// Full pipeline over a corpus. Without `stats` they are fitted on the pooled
/// velocity sequences of all supplied recordings first.
PreprocessedCorpus preprocess_corpus(std::span<const GazeRecording> recordings,
                                     const PreprocessConfig& cfg,
                                     std::optional<NormalizationStats> stats = std::nullopt);

SequenceBatch preprocess_pipeline(const GazeRecording& r, const PreprocessConfig& cfg,
                                  std::optional<NormalizationStats> stats = std::nullopt);

}  // namespace gazebench
