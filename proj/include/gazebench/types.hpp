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

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gazebench/errors.hpp"

namespace gazebench {

/// Marker for an invalid gaze or velocity sample. Every consumer tests for it
/// with is_missing(); arithmetic on it is never relied upon.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) noexcept { return std::isnan(v); }

template <typename Derived>
auto missing_mask(const Eigen::ArrayBase<Derived>& a) {
  return a.isNaN();
}

enum class Session { S1, S2 };

std::string_view to_string(Session s);
Session parse_session(std::string_view text);

/// Two-channel sequence: row 0 horizontal, row 1 vertical.
using Sequence = Eigen::Array2Xd;

/// Monocular gaze positions in degrees of visual angle, uniformly sampled.
class GazeRecording {
 public:
  GazeRecording() = default;
  GazeRecording(std::string subject_id, Session session, std::string task,
                double sampling_rate_hz, Eigen::ArrayXd horizontal_deg,
                Eigen::ArrayXd vertical_deg);

  const std::string& subject_id() const noexcept { return subject_id_; }
  Session session() const noexcept { return session_; }
  const std::string& task() const noexcept { return task_; }
  double sampling_rate_hz() const noexcept { return sampling_rate_hz_; }
  const Eigen::ArrayXd& horizontal() const noexcept { return horizontal_; }
  const Eigen::ArrayXd& vertical() const noexcept { return vertical_; }
  Eigen::Index size() const noexcept { return horizontal_.size(); }

  /// A sample is valid when both channels carry a value.
  bool valid(Eigen::Index i) const {
    return !is_missing(horizontal_[i]) && !is_missing(vertical_[i]);
  }

  /// Same metadata, new signal.
  GazeRecording with_signal(double sampling_rate_hz, Eigen::ArrayXd horizontal,
                            Eigen::ArrayXd vertical) const;

  /// First `n` samples (or all, if shorter).
  GazeRecording head(Eigen::Index n) const;

 private:
  std::string subject_id_;
  Session session_ = Session::S1;
  std::string task_;
  double sampling_rate_hz_ = 1.0;
  Eigen::ArrayXd horizontal_;
  Eigen::ArrayXd vertical_;
};

/// Normalized, fixed-length velocity sequences of one (subject, session).
struct SequenceBatch {
  std::string subject_id;
  Session session = Session::S1;
  std::vector<Sequence> sequences;
  double sequence_duration_s = 5.0;
  Eigen::Index samples_per_sequence = 0;
};

using EmbeddingKey = std::pair<std::string, Session>;

/// Embedding vectors keyed by (subject, session); all of one dimension.
class EmbeddingMatrix {
 public:
  explicit EmbeddingMatrix(Eigen::Index dimension = 128) : dimension_(dimension) {}

  Eigen::Index dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  /// Throws DuplicateKeyError on a repeated key and FormatError on a
  /// dimension mismatch or non-finite entry.
  void insert(const std::string& subject_id, Session session, Eigen::VectorXd row);

  const Eigen::VectorXd& at(const std::string& subject_id, Session session) const;
  bool contains(const std::string& subject_id, Session session) const;

  const std::map<EmbeddingKey, Eigen::VectorXd>& rows() const noexcept { return rows_; }

  /// Rows restricted to one session, as a new matrix.
  EmbeddingMatrix select(Session session) const;

  /// Subjects in key order. Throws DuplicateKeyError if a subject has rows in
  /// more than one session.
  std::map<std::string, Eigen::VectorXd> by_subject() const;

  friend bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

 private:
  Eigen::Index dimension_;
  std::map<EmbeddingKey, Eigen::VectorXd> rows_;
};

enum class Manipulation { None, Decimate, Percentage, NumSequences, Noise };

std::string_view to_string(Manipulation m);
Manipulation parse_manipulation(std::string_view text);

/// One manipulation level's metrics plus run metadata.
struct MetricReport {
  Manipulation manipulation = Manipulation::None;
  double level = 0.0;
  double kcc = std::numeric_limits<double>::quiet_NaN();
  double eer = std::numeric_limits<double>::quiet_NaN();
  double intercorr_mean_abs = std::numeric_limits<double>::quiet_NaN();
  double intercorr_sd = std::numeric_limits<double>::quiet_NaN();
  int n_subjects = 0;
  std::uint64_t seed = 0;
  double norm_mean = std::numeric_limits<double>::quiet_NaN();
  double norm_sd = std::numeric_limits<double>::quiet_NaN();
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct ManifestEntry {
  std::string path;
  std::string subject_id;
  Session session = Session::S1;
  std::string task;
  double sampling_rate_hz = 1000.0;
};

struct RecordingSelector {
  Session session = Session::S1;
  std::string task = "TEX";
  double duration_s = 60.0;

  bool matches(const ManifestEntry& e) const {
    return e.session == session && e.task == task;
  }
};

struct DatasetManifest {
  std::string dataset_name;
  std::vector<ManifestEntry> recordings;
  RecordingSelector enrollment_selector{Session::S1, "TEX", 60.0};
  RecordingSelector authentication_selector{Session::S2, "TEX", 60.0};
  /// Directory relative paths resolve against; not serialized.
  std::string base_dir;

  /// Throws FormatError when an invariant is broken.
  void check() const;
  std::string resolve(const ManifestEntry& e) const;
};

}  // namespace gazebench
