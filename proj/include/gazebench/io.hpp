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

#include <iosfwd>
#include <string>
#include <vector>

#include "gazebench/types.hpp"

namespace gazebench {

/// Shortest decimal text that parses back to exactly `v`; "nan" for NaN.
std::string format_real(double v);

/// Accepts anything std::from_chars does, plus "nan" in any case.
double parse_real(std::string_view text);

// Recording CSV: optional header `x_deg,y_deg`, one row per sample, an empty
// cell or NaN (any case) marks a missing value.
GazeRecording load_recording(const std::string& path, const ManifestEntry& meta);
GazeRecording parse_recording(std::istream& in, const ManifestEntry& meta);
void write_recording(const GazeRecording& r, const std::string& path);

// Embedding CSV: `subject_id,session,e0,...,e{d-1}`.
void write_embeddings(const EmbeddingMatrix& m, const std::string& path);
void write_embeddings(const EmbeddingMatrix& m, std::ostream& out);
EmbeddingMatrix read_embeddings(const std::string& path);
EmbeddingMatrix read_embeddings(std::istream& in);

DatasetManifest read_manifest(const std::string& path);
void write_manifest(const DatasetManifest& m, const std::string& path);

/// Empty iff every file exists and every subject has both an enrollment and an
/// authentication recording.
std::vector<std::string> validate_manifest(const DatasetManifest& m);

// Report CSV: manipulation,level,kcc,eer,intercorr_mean_abs,intercorr_sd,
// n_subjects,seed,norm_mean,norm_sd,error
void write_reports(const std::vector<MetricReport>& reports, const std::string& path);
void write_reports(const std::vector<MetricReport>& reports, std::ostream& out);
std::vector<MetricReport> read_reports(const std::string& path);

/// Named fit row as stored in the fit CSV.
struct FitRow {
  std::string x_name;
  std::string y_name;
  std::string model;
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

// Fit CSV: x_name,y_name,model,a,b,r2,n_points
void write_fits(const std::vector<FitRow>& fits, const std::string& path);
void write_fits(const std::vector<FitRow>& fits, std::ostream& out);

}  // namespace gazebench
