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

#include "gazebench/preprocess.hpp"

#include <algorithm>
#include <cmath>

namespace gazebench {
namespace {

// Neumaier compensated sum.
class CompensatedSum {
 public:
  void add(double v) {
    double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

bool in_range(double v, const std::pair<double, double>& b) {
  return v >= b.first && v <= b.second;
}

Eigen::ArrayXd differentiate(const Eigen::ArrayXd& x, const Eigen::VectorXd& w, double scale) {
  const Eigen::Index n = x.size();
  const Eigen::Index half = w.size() / 2;
  // Odd reflection keeps polynomials of degree <= 1 exact up to the edges.
  Eigen::ArrayXd padded(n + 2 * half);
  padded.segment(half, n) = x;
  for (Eigen::Index j = 1; j <= half; ++j) {
    padded[half - j] = 2.0 * x[0] - x[j];
    padded[half + n - 1 + j] = 2.0 * x[n - 1] - x[n - 1 - j];
  }
  Eigen::ArrayXd out(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    auto window = padded.segment(t, w.size());
    if (window.isNaN().any()) {
      out[t] = kMissing;
    } else {
      out[t] = scale * (window.matrix().dot(w));
    }
  }
  return out;
}

template <typename Visit>
void for_each_valid(std::span<const Sequence> seqs, Visit&& visit) {
  for (const auto& s : seqs)
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      for (Eigen::Index c = 0; c < 2; ++c)
        if (!is_missing(s(c, j))) visit(s(c, j));
}

NormalizationStats finish_stats(std::span<const std::vector<Sequence>> corpus) {
  CompensatedSum sum;
  std::size_t n = 0;
  for (const auto& seqs : corpus)
    for_each_valid(seqs, [&](double v) {
      sum.add(v);
      ++n;
    });
  if (n < 2) throw DegenerateError("normalization needs at least two valid samples");
  const double mean = sum.value() / double(n);
  CompensatedSum sq;
  for (const auto& seqs : corpus)
    for_each_valid(seqs, [&](double v) { sq.add((v - mean) * (v - mean)); });
  const double var = sq.value() / double(n);
  if (!(var > 0.0)) throw DegenerateError("pooled velocity distribution has zero variance");
  return {mean, std::sqrt(var)};
}

}  // namespace

void PreprocessConfig::check() const {
  if (sg_window < 3 || sg_window % 2 == 0 || sg_window <= sg_polyorder)
    throw ArgumentError("sg_window must be odd, >= 3 and greater than sg_polyorder");
  if (sg_polyorder < 1) throw ArgumentError("sg_polyorder must be at least 1 for a derivative");
  if (!(clamp_deg_per_s > 0.0)) throw ArgumentError("clamp_deg_per_s must be positive");
  if (!(sequence_duration_s > 0.0)) throw ArgumentError("sequence_duration_s must be positive");
  if (sequences_per_stream < 1) throw ArgumentError("sequences_per_stream must be >= 1");
  if (!(h_bounds.first < h_bounds.second) || !(v_bounds.first < v_bounds.second))
    throw ArgumentError("gaze bounds must be increasing intervals");
}

GazeRecording apply_gaze_bounds(const GazeRecording& r, const PreprocessConfig& cfg) {
  Eigen::ArrayXd h = r.horizontal();
  Eigen::ArrayXd v = r.vertical();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    const bool ok = !is_missing(h[i]) && !is_missing(v[i]) && in_range(h[i], cfg.h_bounds) &&
                    in_range(v[i], cfg.v_bounds);
    if (!ok) h[i] = v[i] = kMissing;
  }
  return r.with_signal(r.sampling_rate_hz(), std::move(h), std::move(v));
}

Sequence sg_velocity(const GazeRecording& r, const PreprocessConfig& cfg) {
  cfg.check();
  if (r.size() < cfg.sg_window)
    throw TooShortError("recording of " + std::to_string(r.size()) +
                        " samples is shorter than the filter window");
  const Eigen::VectorXd w = savgol_weights<double>(cfg.sg_window, cfg.sg_polyorder, 1);
  Sequence out(2, r.size());
  out.row(0) = differentiate(r.horizontal(), w, r.sampling_rate_hz()).transpose();
  out.row(1) = differentiate(r.vertical(), w, r.sampling_rate_hz()).transpose();
  return out;
}

std::vector<Sequence> segment_sequences(const Sequence& velocity, double sampling_rate_hz,
                                        const PreprocessConfig& cfg) {
  const auto len = Eigen::Index(std::floor(cfg.sequence_duration_s * sampling_rate_hz + 1e-9));
  if (len < 1) throw ArgumentError("sequence length rounds to zero samples");
  const Eigen::Index available = velocity.cols() / len;
  if (available == 0)
    throw TooShortError("signal of " + std::to_string(velocity.cols()) +
                        " samples is shorter than one sequence of " + std::to_string(len));
  const Eigen::Index count = std::min<Eigen::Index>(available, cfg.sequences_per_stream);
  std::vector<Sequence> out;
  out.reserve(std::size_t(count));
  for (Eigen::Index s = 0; s < count; ++s) out.emplace_back(velocity.middleCols(s * len, len));
  return out;
}

std::vector<Sequence> clamp_velocity(std::vector<Sequence> seqs, const PreprocessConfig& cfg) {
  const double c = cfg.clamp_deg_per_s;
  // NaN compares false both ways, so missing samples pass through unchanged.
  for (auto& s : seqs) s = s.unaryExpr([c](double v) { return v > c ? c : (v < -c ? -c : v); });
  return seqs;
}

NormalizationStats fit_normalization(std::span<const Sequence> seqs) {
  std::vector<std::vector<Sequence>> corpus{std::vector<Sequence>(seqs.begin(), seqs.end())};
  return finish_stats(corpus);
}

NormalizationStats fit_normalization(std::span<const std::vector<Sequence>> corpus) {
  return finish_stats(corpus);
}

SequenceBatch normalize_and_fill(const std::vector<Sequence>& seqs, const NormalizationStats& stats,
                                 const std::string& subject_id, Session session,
                                 double sequence_duration_s) {
  if (!(stats.sd > 0.0)) throw ArgumentError("normalization SD must be positive");
  SequenceBatch batch;
  batch.subject_id = subject_id;
  batch.session = session;
  batch.sequence_duration_s = sequence_duration_s;
  batch.samples_per_sequence = seqs.empty() ? 0 : seqs.front().cols();
  batch.sequences.reserve(seqs.size());
  for (const auto& s : seqs) {
    if (s.cols() != batch.samples_per_sequence)
      throw ArgumentError("sequences in a batch must share one length");
    batch.sequences.emplace_back(
        s.unaryExpr([&](double v) { return is_missing(v) ? 0.0 : (v - stats.mean) / stats.sd; }));
  }
  return batch;
}

std::vector<Sequence> velocity_sequences(const GazeRecording& r, const PreprocessConfig& cfg) {
  auto bounded = apply_gaze_bounds(r, cfg);
  auto velocity = sg_velocity(bounded, cfg);
  return clamp_velocity(segment_sequences(velocity, r.sampling_rate_hz(), cfg), cfg);
}

PreprocessedCorpus preprocess_corpus(std::span<const GazeRecording> recordings,
                                     const PreprocessConfig& cfg,
                                     std::optional<NormalizationStats> stats) {
  cfg.check();
  std::vector<std::vector<Sequence>> raw;
  raw.reserve(recordings.size());
  for (const auto& r : recordings) raw.push_back(velocity_sequences(r, cfg));
  PreprocessedCorpus out;
  out.stats = stats ? *stats : fit_normalization(std::span<const std::vector<Sequence>>(raw));
  out.batches.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    out.batches.push_back(normalize_and_fill(raw[i], out.stats, recordings[i].subject_id(),
                                             recordings[i].session(), cfg.sequence_duration_s));
  return out;
}

SequenceBatch preprocess_pipeline(const GazeRecording& r, const PreprocessConfig& cfg,
                                  std::optional<NormalizationStats> stats) {
  return std::move(preprocess_corpus(std::span<const GazeRecording>(&r, 1), cfg, stats).batches[0]);
}

}  // namespace gazebench
