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

// Signal-quality manipulations. Decimation and noise act on raw positions,
// percentage truncation on normalized sequences, sequence count at centroid
// time.

inline constexpr int kMaxStageFactor = 13;
inline constexpr int kAntiAliasOrder = 8;
inline constexpr double kAntiAliasRippleDb = 0.05;
inline constexpr double kAntiAliasCutoff = 0.8;  // fraction of the new Nyquist

/// Integer factor realizing `target_hz` from `source_hz` (333 Hz from 1000 Hz
/// gives 3). Throws ArgumentError when no factor lands within 1% of target.
int decimation_factor(double source_hz, double target_hz);

/// Factors of `q`, each at most 13, with the fewest stages and then the
/// smallest largest factor; largest first. {q} when q <= 13.
std::vector<int> decimation_stages(int q);

/// Anti-aliased downsampling by `q` (zero-phase Chebyshev-I per stage).
/// Missing samples are bridged for filtering, then every output sample within
/// the filter's effective support of a missing input is marked missing.
GazeRecording decimate(const GazeRecording& r, int q);

/// Keeps the first round(p * L / 100) samples and centres them in an
/// otherwise zero sequence of the same length.
Sequence percentage_truncate(const Sequence& seq, double percent);

SequenceBatch take_first_sequences(const SequenceBatch& batch, int n);

/// 64-bit key for per-recording random streams.
std::uint64_t stream_key(std::uint64_t seed, const std::string& subject_id, Session session,
                         std::uint64_t salt = 0);

/// Adds N(0, sigma^2) noise to every non-missing value of both channels.
/// The stream depends only on (seed, subject, session) and the sample index.
GazeRecording inject_noise(const GazeRecording& r, double sigma_deg, std::uint64_t seed);

enum class PrecisionVariant {
  SuccessiveDifferences,  // RMS of sample-to-sample differences
  DeviationFromMean,      // RMS deviation from the segment mean
};

inline constexpr double kPrecisionSegmentS = 0.080;
inline constexpr double kPrecisionPercentile = 5.0;
inline constexpr int kPrecisionMinSegments = 20;

/// Horizontal-channel spatial precision in degrees: median of the per-segment
/// RMS values at or below their 5th percentile, over 80 ms segments that
/// contain no missing sample.
double spatial_precision(const GazeRecording& r,
                         PrecisionVariant variant = PrecisionVariant::SuccessiveDifferences);

}  // namespace gazebench
