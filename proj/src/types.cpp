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

#include "gazebench/types.hpp"

#include <filesystem>
#include <set>
#include <tuple>

namespace gazebench {

std::string_view to_string(Session s) { return s == Session::S1 ? "S1" : "S2"; }

Session parse_session(std::string_view text) {
  if (text == "S1") return Session::S1;
  if (text == "S2") return Session::S2;
  throw FormatError("unknown session '" + std::string(text) + "' (expected S1 or S2)");
}

GazeRecording::GazeRecording(std::string subject_id, Session session, std::string task,
                             double sampling_rate_hz, Eigen::ArrayXd horizontal_deg,
                             Eigen::ArrayXd vertical_deg)
    : subject_id_(std::move(subject_id)),
      session_(session),
      task_(std::move(task)),
      sampling_rate_hz_(sampling_rate_hz),
      horizontal_(std::move(horizontal_deg)),
      vertical_(std::move(vertical_deg)) {
  if (!(sampling_rate_hz_ > 0.0) || !std::isfinite(sampling_rate_hz_))
    throw ArgumentError("sampling rate must be positive and finite");
  if (horizontal_.size() != vertical_.size())
    throw ArgumentError("horizontal and vertical channels differ in length");
  for (Eigen::Index i = 0; i < horizontal_.size(); ++i) {
    if (std::isinf(horizontal_[i]) || std::isinf(vertical_[i]))
      throw ArgumentError("infinite gaze sample at index " + std::to_string(i));
  }
}

GazeRecording GazeRecording::with_signal(double sampling_rate_hz, Eigen::ArrayXd horizontal,
                                         Eigen::ArrayXd vertical) const {
  return GazeRecording(subject_id_, session_, task_, sampling_rate_hz, std::move(horizontal),
                       std::move(vertical));
}

GazeRecording GazeRecording::head(Eigen::Index n) const {
  const Eigen::Index m = std::min(n, size());
  return with_signal(sampling_rate_hz_, horizontal_.head(m), vertical_.head(m));
}

void EmbeddingMatrix::insert(const std::string& subject_id, Session session,
                             Eigen::VectorXd row) {
  if (row.size() != dimension_)
    throw FormatError("embedding for " + subject_id + " has dimension " +
                      std::to_string(row.size()) + ", expected " + std::to_string(dimension_));
  if (!row.allFinite()) throw FormatError("embedding for " + subject_id + " is not finite");
  auto [it, inserted] = rows_.try_emplace({subject_id, session}, std::move(row));
  if (!inserted)
    throw DuplicateKeyError("duplicate embedding key (" + subject_id + ", " +
                            std::string(to_string(session)) + ")");
}

const Eigen::VectorXd& EmbeddingMatrix::at(const std::string& subject_id, Session session) const {
  auto it = rows_.find({subject_id, session});
  if (it == rows_.end())
    throw ArgumentError("no embedding for (" + subject_id + ", " +
                        std::string(to_string(session)) + ")");
  return it->second;
}

bool EmbeddingMatrix::contains(const std::string& subject_id, Session session) const {
  return rows_.count({subject_id, session}) != 0;
}

EmbeddingMatrix EmbeddingMatrix::select(Session session) const {
  EmbeddingMatrix out(dimension_);
  for (const auto& [key, row] : rows_)
    if (key.second == session) out.rows_.emplace(key, row);
  return out;
}

std::map<std::string, Eigen::VectorXd> EmbeddingMatrix::by_subject() const {
  std::map<std::string, Eigen::VectorXd> out;
  for (const auto& [key, row] : rows_) {
    if (!out.emplace(key.first, row).second)
      throw DuplicateKeyError("subject " + key.first + " has rows in both sessions");
  }
  return out;
}

bool operator==(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.dimension_ != b.dimension_ || a.rows_.size() != b.rows_.size()) return false;
  auto ib = b.rows_.begin();
  for (const auto& [key, row] : a.rows_) {
    if (key != ib->first || !(row.array() == ib->second.array()).all()) return false;
    ++ib;
  }
  return true;
}

std::string_view to_string(Manipulation m) {
  switch (m) {
    case Manipulation::None: return "none";
    case Manipulation::Decimate: return "decimate";
    case Manipulation::Percentage: return "percentage";
    case Manipulation::NumSequences: return "num_sequences";
    case Manipulation::Noise: return "noise";
  }
  return "none";
}

Manipulation parse_manipulation(std::string_view text) {
  for (auto m : {Manipulation::None, Manipulation::Decimate, Manipulation::Percentage,
                 Manipulation::NumSequences, Manipulation::Noise})
    if (to_string(m) == text) return m;
  throw FormatError("unknown manipulation '" + std::string(text) + "'");
}

void DatasetManifest::check() const {
  std::set<std::tuple<std::string, Session, std::string>> seen;
  for (const auto& e : recordings) {
    if (!(e.sampling_rate_hz > 0.0))
      throw FormatError("recording " + e.path + " has a non-positive sampling rate");
    if (!seen.emplace(e.subject_id, e.session, e.task).second)
      throw FormatError("manifest lists (" + e.subject_id + ", " +
                        std::string(to_string(e.session)) + ", " + e.task + ") twice");
  }
  if (enrollment_selector.session == authentication_selector.session)
    throw FormatError("enrollment and authentication selectors share a session");
}

std::string DatasetManifest::resolve(const ManifestEntry& e) const {
  std::filesystem::path p(e.path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (std::filesystem::path(base_dir) / p).string();
}

}  // namespace gazebench
