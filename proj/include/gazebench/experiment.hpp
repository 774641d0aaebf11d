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
#include <optional>
#include <string>
#include <vector>

#include "gazebench/fitting.hpp"
#include "gazebench/io.hpp"
#include "gazebench/metrics.hpp"
#include "gazebench/preprocess.hpp"
#include "gazebench/synthetic.hpp"
#include "gazebench/types.hpp"

namespace gazebench {

struct ManipulationGrids {
  std::vector<double> decimate_hz{1000, 500, 333, 250, 100, 50, 25, 10};
  std::vector<double> percentage{100, 50, 33, 25, 10, 5, 2.5, 1};
  std::vector<int> n_sequences{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<double> noise_sd{0, 0.05, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2};
};

struct ExperimentConfig {
  std::optional<std::string> manifest_path;
  std::optional<SyntheticSpec> synthetic;
  PreprocessConfig preprocess;
  std::string embedder = "stat";  // "stat" | "seeded-conv" | "external:<dir>"
  ManipulationGrids grids;
  std::uint64_t seed = 7;
  std::string out_dir = "out";
  KccAggregation kcc_aggregation = KccAggregation::Mean;
  IntercorrPopulation intercorr_population = IntercorrPopulation::EnrollmentCentroids;
  /// Z-score every embedding dimension over the pooled enrollment and
  /// authentication centroids before cosine scoring.
  bool standardize_embeddings = true;

  void check() const;
};

/// Reads the JSON config. Sections: data | synthetic, preprocess, embedder,
/// grids, seed, out_dir. Relative manifest paths resolve against the config's
/// directory.
ExperimentConfig read_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = "");
std::string config_to_json(const ExperimentConfig& cfg);

/// Synthetic data is generated in memory; a manifest is loaded from disk.
Dataset make_dataset(const ExperimentConfig& cfg);

struct Condition {
  Manipulation kind = Manipulation::None;
  double level = 0.0;
};

/// File stem of a condition's embeddings under an external embedder
/// directory, e.g. "noise_0.5".
std::string condition_tag(Condition c);

/// All grid levels in (manipulation, level) order.
std::vector<Condition> sweep_conditions(const ExperimentConfig& cfg);

/// Prepared, normalized velocity sequences of every subject with both an
/// enrollment and an authentication recording, under condition `c`.
PreprocessedCorpus preprocess_dataset(const ExperimentConfig& cfg, const Dataset& data,
                                      Condition c = {});

/// Centroid embeddings of the same recordings, keyed by (subject, session).
EmbeddingMatrix embed_dataset(const ExperimentConfig& cfg, const Dataset& data,
                              Condition c = {});

/// One point of a results plot: manipulate, preprocess, embed, score. Data
/// errors become an error row rather than an exception.
MetricReport run_condition(const ExperimentConfig& cfg, const Dataset& data, Condition c);

/// Metrics of given enrollment and authentication embeddings.
MetricReport evaluate_embeddings(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth,
                                 KccAggregation aggregation = KccAggregation::Mean,
                                 bool standardize = false);

struct SweepResult {
  std::vector<MetricReport> reports;
  std::vector<FitRow> fits;
};

/// Conditions run on `jobs` workers; output is independent of `jobs`.
SweepResult run_sweep(const ExperimentConfig& cfg, const Dataset& data, int jobs = 1);

/// level -> kcc and level -> eer per manipulation (log model except noise),
/// then the pooled kcc -> eer linear fit over every successful row.
std::vector<FitRow> sweep_fits(const std::vector<MetricReport>& reports);

/// Writes report.csv and fits.csv under `out_dir`.
void write_sweep(const SweepResult& r, const std::string& out_dir);

struct SubjectPrecision {
  std::string subject_id;
  int n_recordings = 0;
  double precision_deg = 0.0;  // NaN when no recording had enough clean data
  std::string warning;
};

struct PrecisionTable {
  std::vector<SubjectPrecision> subjects;
  double dataset_median = 0.0;
};

/// Median precision over each subject's recordings after adding noise, plus
/// the median over subjects.
PrecisionTable subject_spatial_precision(const Dataset& data, double noise_sd, std::uint64_t seed);

void write_precision(const PrecisionTable& t, const std::string& path);

}  // namespace gazebench
