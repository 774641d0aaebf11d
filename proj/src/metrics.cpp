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

#include "gazebench/metrics.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace gazebench {
namespace {

struct Rate {
  double far;
  double frr;
};

std::string describe_difference(const std::map<std::string, Eigen::VectorXd>& a,
                                const std::map<std::string, Eigen::VectorXd>& b) {
  std::string only_a, only_b;
  for (const auto& [s, v] : a)
    if (!b.count(s)) only_a += (only_a.empty() ? "" : " ") + s;
  for (const auto& [s, v] : b)
    if (!a.count(s)) only_b += (only_b.empty() ? "" : " ") + s;
  return "enrollment-only: [" + only_a + "], authentication-only: [" + only_b + "]";
}

std::pair<std::map<std::string, Eigen::VectorXd>, std::map<std::string, Eigen::VectorXd>>
paired_subjects(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth) {
  if (enroll.dimension() != auth.dimension())
    throw ArgumentError("enrollment and authentication embeddings differ in dimension");
  auto e = enroll.by_subject();
  auto a = auth.by_subject();
  bool same = e.size() == a.size();
  for (auto ie = e.begin(), ia = a.begin(); same && ie != e.end(); ++ie, ++ia)
    same = ie->first == ia->first;
  if (!same) throw ArgumentError("subject sets differ: " + describe_difference(e, a));
  return {std::move(e), std::move(a)};
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ArgumentError("cosine similarity of unequal dimensions");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine similarity undefined for a zero vector");
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

ScoreSets build_score_sets(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth) {
  auto [e, a] = paired_subjects(enroll, auth);
  ScoreSets s;
  s.genuine.reserve(e.size());
  s.impostor.reserve(e.size() * (e.size() - 1));
  for (const auto& [subject, vec] : e) s.genuine.push_back(cosine_similarity(vec, a.at(subject)));
  for (const auto& [se, ve] : e)
    for (const auto& [sa, va] : a)
      if (se != sa) s.impostor.push_back(cosine_similarity(ve, va));
  return s;
}

double eer(const ScoreSets& s) {
  if (s.genuine.empty() || s.impostor.empty())
    throw ArgumentError("EER needs non-empty genuine and impostor score sets");
  std::vector<double> gen = s.genuine;
  std::vector<double> imp = s.impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> thresholds = gen;
  thresholds.insert(thresholds.end(), imp.begin(), imp.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  thresholds.push_back(std::numeric_limits<double>::infinity());

  const double ng = double(gen.size());
  const double ni = double(imp.size());
  auto rates = [&](double t) {
    const auto imp_below = std::lower_bound(imp.begin(), imp.end(), t) - imp.begin();
    const auto gen_below = std::lower_bound(gen.begin(), gen.end(), t) - gen.begin();
    return Rate{(ni - double(imp_below)) / ni, double(gen_below) / ng};
  };

  Rate prev = rates(thresholds.front());
  if (prev.far == prev.frr) return prev.far;
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    const Rate cur = rates(thresholds[i]);
    const double d0 = prev.far - prev.frr;
    const double d1 = cur.far - cur.frr;
    if (d1 == 0.0) return cur.far;
    if ((d0 > 0.0) != (d1 > 0.0)) {
      const double t = d0 / (d0 - d1);
      return prev.far + t * (cur.far - prev.far);
    }
    prev = cur;
  }
  // FAR - FRR goes from >= 0 at the lowest score to -1 at +inf, so a sign
  // change is always found above.
  throw std::logic_error("EER crossing not found");
}

double kendalls_w(const Eigen::MatrixXd& scores) {
  const double k = double(scores.rows());
  const double n = double(scores.cols());
  if (scores.rows() < 2 || scores.cols() < 2)
    throw ArgumentError("Kendall's W needs at least two rankings of two items");
  Eigen::ArrayXd rank_sums = Eigen::ArrayXd::Zero(scores.cols());
  double ties = 0.0;
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const Eigen::VectorXd row = scores.row(r).transpose();
    rank_sums += average_ranks(row);
    ties += tie_correction(row);
  }
  const double denom = k * k * (n * n * n - n) - k * ties;
  if (!(denom > 0.0)) throw DegenerateError("every ranking is constant");
  const double numer = 12.0 * (rank_sums - k * (n + 1.0) / 2.0).square().sum();
  return std::clamp(numer / denom, 0.0, 1.0);
}

double spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ArgumentError("Spearman correlation needs two equal-length vectors of >= 2 values");
  Eigen::ArrayXd rx = average_ranks(x);
  Eigen::ArrayXd ry = average_ranks(y);
  rx -= rx.mean();
  ry -= ry.mean();
  const double sx = std::sqrt(rx.square().sum());
  const double sy = std::sqrt(ry.square().sum());
  if (sx == 0.0 || sy == 0.0) throw DegenerateError("Spearman correlation of a constant vector");
  return std::clamp((rx * ry).sum() / (sx * sy), -1.0, 1.0);
}

PersistenceResult temporal_persistence(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth,
                                       KccAggregation aggregation) {
  auto [e, a] = paired_subjects(enroll, auth);
  if (e.size() < 3) throw InsufficientDataError("temporal persistence needs at least 3 subjects");
  const Eigen::Index dim = enroll.dimension();
  const auto n = Eigen::Index(e.size());
  Eigen::MatrixXd s1(dim, n), s2(dim, n);
  Eigen::Index col = 0;
  for (const auto& [subject, vec] : e) {
    s1.col(col) = vec;
    s2.col(col) = a.at(subject);
    ++col;
  }
  PersistenceResult out;
  out.per_dimension_w = Eigen::VectorXd::Constant(dim, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> kept;
  for (Eigen::Index d = 0; d < dim; ++d) {
    Eigen::MatrixXd rankings(2, n);
    rankings.row(0) = s1.row(d);
    rankings.row(1) = s2.row(d);
    try {
      out.per_dimension_w[d] = kendalls_w(rankings);
      kept.push_back(out.per_dimension_w[d]);
    } catch (const DegenerateError&) {
      out.skipped.push_back(d);
    }
  }
  if (kept.empty()) throw DegenerateError("every embedding dimension is constant in both sessions");
  if (aggregation == KccAggregation::Median) {
    out.mean_w = median_of(kept);
  } else {
    out.mean_w = Eigen::Map<const Eigen::ArrayXd>(kept.data(), Eigen::Index(kept.size())).mean();
  }
  return out;
}

IntercorrResult intercorrelation(const EmbeddingMatrix& m) {
  if (m.size() < 3) throw InsufficientDataError("intercorrelation needs at least 3 subjects");
  Eigen::MatrixXd values(Eigen::Index(m.size()), m.dimension());
  Eigen::Index r = 0;
  for (const auto& [key, vec] : m.rows()) values.row(r++) = vec.transpose();
  return intercorrelation(values);
}

IntercorrResult intercorrelation(const Eigen::MatrixXd& values) {
  if (values.rows() < 3) throw InsufficientDataError("intercorrelation needs at least 3 rows");
  const Eigen::Index dim = values.cols();
  const Eigen::Index n = values.rows();
  // Centred, unit-norm rank columns; their dot products are Spearman's rho.
  IntercorrResult out;
  Eigen::MatrixXd ranks(n, dim);
  std::vector<Eigen::Index> usable;
  for (Eigen::Index d = 0; d < dim; ++d) {
    Eigen::ArrayXd rk = average_ranks(values.col(d));
    rk -= rk.mean();
    const double norm = std::sqrt(rk.square().sum());
    if (norm == 0.0) {
      out.skipped.push_back(d);
      continue;
    }
    ranks.col(d) = (rk / norm).matrix();
    usable.push_back(d);
  }
  if (usable.size() < 2) throw DegenerateError("fewer than two non-constant dimensions");
  std::vector<double> abs_rho;
  abs_rho.reserve(usable.size() * (usable.size() - 1) / 2);
  for (std::size_t i = 0; i < usable.size(); ++i)
    for (std::size_t j = i + 1; j < usable.size(); ++j)
      abs_rho.push_back(std::min(1.0, std::abs(ranks.col(usable[i]).dot(ranks.col(usable[j])))));
  const Eigen::Map<const Eigen::ArrayXd> v(abs_rho.data(), Eigen::Index(abs_rho.size()));
  out.n_pairs = abs_rho.size();
  out.mean_abs = v.mean();
  out.sd_abs = std::sqrt((v - out.mean_abs).square().mean());
  return out;
}

}  // namespace gazebench
