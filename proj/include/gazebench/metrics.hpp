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

#include <algorithm>
#include <numeric>
#include <vector>

#include "gazebench/types.hpp"

namespace gazebench {

/// Average ranks (1-based); ties share the mean of the ranks they span.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> average_ranks(
    const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) < values(b); });
  Eigen::Array<Scalar, Eigen::Dynamic, 1> ranks(n);
  for (Eigen::Index i = 0; i < n;) {
    Eigen::Index j = i;
    while (j + 1 < n && values(order[std::size_t(j + 1)]) == values(order[std::size_t(i)])) ++j;
    const Scalar r = Scalar(i + j + 2) / Scalar(2);
    for (Eigen::Index k = i; k <= j; ++k) ranks(order[std::size_t(k)]) = r;
    i = j + 1;
  }
  return ranks;
}

/// Sum over tie groups of (t^3 - t).
template <typename Derived>
typename Derived::Scalar tie_correction(const Eigen::DenseBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  std::vector<Scalar> v(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) v[std::size_t(i)] = values(i);
  std::sort(v.begin(), v.end());
  Scalar total = 0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    const Scalar t = Scalar(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

struct ScoreSets {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct PersistenceResult {
  Eigen::VectorXd per_dimension_w;  // NaN where the dimension was skipped
  double mean_w = 0.0;
  std::vector<Eigen::Index> skipped;
};

struct IntercorrResult {
  double mean_abs = 0.0;
  double sd_abs = 0.0;
  std::size_t n_pairs = 0;
  std::vector<Eigen::Index> skipped;
};

enum class KccAggregation { Mean, Median };

/// Throws DomainError if either vector is zero or the sizes differ.
double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Genuine: enrollment vs authentication of the same subject, in subject
/// order. Impostor: every ordered pair of distinct subjects.
ScoreSets build_score_sets(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth);

/// FAR(t) = #{impostor >= t}/|impostor|, FRR(t) = #{genuine < t}/|genuine|,
/// swept over the sorted score union plus +inf; the crossing is linearly
/// interpolated between the bracketing thresholds.
double eer(const ScoreSets& s);

/// Kendall's W with tie correction. Rows are the k rankings (raters), columns
/// the n ranked items.
double kendalls_w(const Eigen::MatrixXd& scores);

/// Spearman rank correlation; throws DegenerateError for a constant input.
double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Per-dimension Kendall's W of the subject ranking in the two sessions.
PersistenceResult temporal_persistence(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth,
                                       KccAggregation aggregation = KccAggregation::Mean);

/// |Spearman| between every pair of dimensions, across the rows of `m`.
IntercorrResult intercorrelation(const EmbeddingMatrix& m);

/// Same, over the rows of a plain matrix (one observation per row).
IntercorrResult intercorrelation(const Eigen::MatrixXd& values);

/// Rows over which intercorrelation is computed in an experiment.
enum class IntercorrPopulation { EnrollmentCentroids, EnrollmentSequences };

}  // namespace gazebench
