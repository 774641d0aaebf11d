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

#include "gazebench/embed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/FFT>

namespace gazebench {
namespace {

constexpr int kLags[] = {1, 2, 5, 10, 20};
constexpr int kBands = 8;
constexpr int kHaarScales = 4;
constexpr double kQuantiles[] = {0.05, 0.25, 0.50, 0.75, 0.95};

// Linearly interpolated quantiles for ascending `qs`, by successive selection
// over the shrinking upper part of `v`.
template <std::size_t N>
std::array<double, N> quantiles(std::vector<double>& v, const double (&qs)[N]) {
  std::array<double, N> out{};
  auto first = v.begin();
  for (std::size_t j = 0; j < N; ++j) {
    const double pos = qs[j] * double(v.size() - 1);
    const auto lo = std::size_t(pos);
    const auto at = v.begin() + std::ptrdiff_t(lo);
    std::nth_element(first, at, v.end());
    const double a = *at;
    const double b = lo + 1 < v.size() ? *std::min_element(at + 1, v.end()) : a;
    out[j] = a + (pos - double(lo)) * (b - a);
    first = at;
  }
  return out;
}

}  // namespace

Eigen::VectorXd StatFeatureEmbedder::feature_block(const Eigen::ArrayXd& x) {
  const Eigen::Index n = x.size();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(kBlockSize);
  Eigen::Index k = 0;

  const double mean = x.mean();
  const Eigen::ArrayXd c = x - mean;
  const double m2 = c.square().mean();
  const double sd = std::sqrt(m2);
  f[k++] = mean;
  f[k++] = sd;
  if (m2 > 1e-24) {
    f[k++] = c.cube().mean() / (m2 * sd);
    f[k++] = c.square().square().mean() / (m2 * m2) - 3.0;
  } else {
    k += 2;
  }
  f[k++] = x.minCoeff();
  f[k++] = x.maxCoeff();

  std::vector<double> scratch(x.data(), x.data() + n);
  for (double q : quantiles(scratch, kQuantiles)) f[k++] = q;

  f[k++] = x.abs().mean();
  f[k++] = std::sqrt(x.square().mean());
  Eigen::Index crossings = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) crossings += (x[i] * x[i + 1] < 0.0) ? 1 : 0;
  f[k++] = n > 1 ? double(crossings) / double(n - 1) : 0.0;

  const double denom = c.square().sum();
  for (int lag : kLags) {
    if (lag < n && denom > 1e-24)
      f[k] = (c.head(n - lag) * c.tail(n - lag)).sum() / denom;
    ++k;
  }

  // Power spectrum (zero-padded to a power of two), positive-frequency bins
  // split at log-spaced edges.
  {
    Eigen::Index nfft = 1;
    while (nfft < n) nfft <<= 1;
    thread_local Eigen::FFT<double> fft;  // caches twiddles per size
    std::vector<double> in(std::size_t(nfft), 0.0);
    std::copy(x.data(), x.data() + n, in.begin());
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);
    const Eigen::Index bins = nfft / 2;
    std::vector<Eigen::Index> edge(kBands + 1);
    for (int b = 0; b < kBands; ++b) {
      edge[std::size_t(b)] = Eigen::Index(std::floor(std::pow(double(bins), double(b) / kBands)));
      if (b > 0) edge[std::size_t(b)] = std::max(edge[std::size_t(b)], edge[std::size_t(b) - 1] + 1);
    }
    edge[0] = 1;
    edge[kBands] = bins + 1;
    for (int b = 0; b < kBands; ++b) {
      const Eigen::Index lo = std::min(edge[std::size_t(b)], bins + 1);
      const Eigen::Index hi = std::max(lo, edge[std::size_t(b) + 1]);
      double power = 0.0;
      for (Eigen::Index i = lo; i < hi; ++i) power += std::norm(spec[std::size_t(i)]);
      f[k++] = hi > lo ? std::log1p(power / double(n) / double(hi - lo)) : 0.0;
    }
  }

  for (int j = 0; j < kHaarScales; ++j) {
    const Eigen::Index half = std::max<Eigen::Index>(1, n >> (2 * j + 3));
    const Eigen::Index blocks = n / (2 * half);
    double acc = 0.0;
    for (Eigen::Index b = 0; b < blocks; ++b) {
      const Eigen::Index start = b * 2 * half;
      acc += x.segment(start + half, half).mean() - x.segment(start, half).mean();
    }
    f[k++] = blocks > 0 ? acc / double(blocks) : 0.0;
  }
  return f;
}

Eigen::VectorXd StatFeatureEmbedder::embed(const Sequence& seq) const {
  Eigen::VectorXd out(kEmbeddingDim);
  for (Eigen::Index ch = 0; ch < 2; ++ch) {
    const Eigen::ArrayXd x = seq.row(ch).transpose();
    const Eigen::Index n = x.size();
    const Eigen::ArrayXd dx = x.tail(n - 1) - x.head(n - 1);
    auto block = out.segment(ch * kPerChannel, kPerChannel);
    block.head(kBlockSize) = feature_block(x);
    block.segment(kBlockSize, kBlockSize) = feature_block(dx);
    block[2 * kBlockSize] = double((x == 0.0).count()) / double(n);
    block[2 * kBlockSize + 1] = double((x.abs() > 1.0).count()) / double(n);
  }
  return out;
}

SeededConvEmbedder::SeededConvEmbedder(std::uint64_t seed) : seed_(seed) {
  std::mt19937_64 gen(seed);
  auto uniform = [&gen](Eigen::Index rows, Eigen::Index cols, double bound) {
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(gen);
    return m;
  };
  for (int layer = 0; layer < kLayers; ++layer) {
    const Eigen::Index fan_in = Eigen::Index(2 + layer * kChannels) * kKernel;
    weights_.push_back(uniform(kChannels, fan_in, std::sqrt(6.0 / double(fan_in))));
    biases_.push_back(uniform(kChannels, 1, 1.0 / std::sqrt(double(fan_in))).col(0));
  }
  const Eigen::Index pooled = 2 + kLayers * kChannels;
  projection_ = uniform(kEmbeddingDim, pooled, std::sqrt(6.0 / double(pooled + kEmbeddingDim)));
}

Eigen::VectorXd SeededConvEmbedder::embed(const Sequence& seq) const {
  const Eigen::Index len = seq.cols();
  Eigen::MatrixXd features(2 + kLayers * kChannels, len);
  features.topRows(2) = seq.matrix();
  Eigen::MatrixXd cols;
  for (int layer = 0; layer < kLayers; ++layer) {
    const Eigen::Index in = 2 + Eigen::Index(layer) * kChannels;
    const Eigen::Index dilation = Eigen::Index(1) << layer;
    cols.setZero(in * kKernel, len);
    for (int tap = 0; tap < kKernel; ++tap) {
      const Eigen::Index offset = (tap - 1) * dilation;
      const Eigen::Index span = len - std::abs(offset);
      if (span <= 0) continue;
      cols.block(tap * in, std::max<Eigen::Index>(0, -offset), in, span) =
          features.block(0, std::max<Eigen::Index>(0, offset), in, span);
    }
    Eigen::MatrixXd out = weights_[std::size_t(layer)] * cols;
    out.colwise() += biases_[std::size_t(layer)];
    features.middleRows(in, kChannels) = out.cwiseMax(0.0);
  }
  return projection_ * features.rowwise().mean();
}

std::unique_ptr<EmbeddingProvider> make_provider(const std::string& embedder, std::uint64_t seed) {
  if (embedder == "stat") return std::make_unique<StatFeatureEmbedder>();
  if (embedder == "seeded-conv") return std::make_unique<SeededConvEmbedder>(seed);
  throw ArgumentError("unknown embedder '" + embedder + "' (expected stat or seeded-conv)");
}

Eigen::VectorXd embed_sequence(const EmbeddingProvider& provider, const Sequence& seq) {
  if (seq.cols() < kMinSequenceLength)
    throw ArgumentError("sequence of " + std::to_string(seq.cols()) +
                        " samples is shorter than the embedding minimum of " +
                        std::to_string(kMinSequenceLength));
  if (!seq.allFinite()) throw ArgumentError("sequence contains non-finite values");
  Eigen::VectorXd e = provider.embed(seq);
  if (e.size() != provider.dimension() || !e.allFinite())
    throw std::logic_error("provider " + provider.name() + " broke its output contract");
  return e;
}

Eigen::VectorXd centroid(std::span<const Eigen::VectorXd> embeddings) {
  if (embeddings.empty()) throw ArgumentError("centroid of an empty list");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embeddings.front().size());
  for (const auto& e : embeddings) {
    if (e.size() != sum.size()) throw ArgumentError("embeddings differ in dimension");
    sum += e;
  }
  return sum / double(embeddings.size());
}

std::vector<std::vector<Eigen::VectorXd>> embed_batches(const EmbeddingProvider& provider,
                                                        std::span<const SequenceBatch> batches,
                                                        int n_sequences) {
  std::vector<std::vector<Eigen::VectorXd>> out;
  out.reserve(batches.size());
  for (const auto& b : batches) {
    if (n_sequences < 1 || b.sequences.size() < std::size_t(n_sequences))
      throw ArgumentError("subject " + b.subject_id + " (" + std::string(to_string(b.session)) +
                          ") has " + std::to_string(b.sequences.size()) + " sequences, needs " +
                          std::to_string(n_sequences));
    std::vector<Eigen::VectorXd> row;
    row.reserve(std::size_t(n_sequences));
    for (int i = 0; i < n_sequences; ++i)
      row.push_back(embed_sequence(provider, b.sequences[std::size_t(i)]));
    out.push_back(std::move(row));
  }
  return out;
}

EmbeddingMatrix build_embedding_matrix(const EmbeddingProvider& provider,
                                       std::span<const SequenceBatch> batches, int n_sequences) {
  auto per_sequence = embed_batches(provider, batches, n_sequences);
  EmbeddingMatrix m(provider.dimension());
  for (std::size_t i = 0; i < batches.size(); ++i)
    m.insert(batches[i].subject_id, batches[i].session, centroid(per_sequence[i]));
  return m;
}

}  // namespace gazebench
