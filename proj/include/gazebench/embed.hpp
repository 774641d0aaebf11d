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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gazebench/types.hpp"

namespace gazebench {

inline constexpr Eigen::Index kEmbeddingDim = 128;
inline constexpr Eigen::Index kMinSequenceLength = 64;

/// Maps one 2 x L sequence to a fixed-length vector. Implementations are
/// immutable after construction and safe to share between threads.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string name() const = 0;
  virtual Eigen::Index dimension() const { return kEmbeddingDim; }
  virtual bool deterministic() const { return true; }
  virtual Eigen::VectorXd embed(const Sequence& seq) const = 0;
};

/// Hand-built statistics of each velocity channel: 64 features per channel,
/// horizontal first.
///
/// Per channel, the same 31-feature block is computed on the signal and on its
/// first difference:
///   mean, SD, skewness, excess kurtosis, min, max,
///   quantiles 5/25/50/75/95 %, mean |x|, RMS, zero-crossing rate,
///   autocorrelation at lags 1, 2, 5, 10, 20,
///   log1p band power in 8 log-spaced bands of the power spectrum,
///   signed Haar mean differences at 4 dyadic scales,
/// followed by the fraction of exact zeros (filled samples) and the fraction
/// of samples with |x| > 1 on the signal itself.
class StatFeatureEmbedder final : public EmbeddingProvider {
 public:
  static constexpr Eigen::Index kBlockSize = 31;
  static constexpr Eigen::Index kPerChannel = 64;

  std::string name() const override { return "stat"; }
  Eigen::VectorXd embed(const Sequence& seq) const override;

  /// The 31-feature block for one series.
  static Eigen::VectorXd feature_block(const Eigen::ArrayXd& x);
};

/// Untrained dense-concatenation 1-D CNN: 8 dilated conv layers (kernel 3,
/// 32 channels, dilation 1..128, ReLU), each fed the concatenation of the
/// input and all previous outputs, then global average pooling and a fixed
/// random projection to 128. Weights are drawn once from `seed`.
class SeededConvEmbedder final : public EmbeddingProvider {
 public:
  static constexpr int kLayers = 8;
  static constexpr int kKernel = 3;
  static constexpr int kChannels = 32;

  explicit SeededConvEmbedder(std::uint64_t seed);

  std::string name() const override { return "seeded-conv"; }
  Eigen::VectorXd embed(const Sequence& seq) const override;
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::vector<Eigen::MatrixXd> weights_;  // kChannels x (in_channels * kKernel)
  std::vector<Eigen::VectorXd> biases_;
  Eigen::MatrixXd projection_;            // 128 x (2 + kLayers * kChannels)
};

/// `embedder` is "stat" or "seeded-conv".
std::unique_ptr<EmbeddingProvider> make_provider(const std::string& embedder, std::uint64_t seed);

/// Checks the length precondition and the provider's output contract.
Eigen::VectorXd embed_sequence(const EmbeddingProvider& provider, const Sequence& seq);

Eigen::VectorXd centroid(std::span<const Eigen::VectorXd> embeddings);

/// Centroid of the first `n_sequences` sequence embeddings per batch.
EmbeddingMatrix build_embedding_matrix(const EmbeddingProvider& provider,
                                       std::span<const SequenceBatch> batches, int n_sequences);

/// Per-sequence embeddings of every batch, in batch order.
std::vector<std::vector<Eigen::VectorXd>> embed_batches(const EmbeddingProvider& provider,
                                                        std::span<const SequenceBatch> batches,
                                                        int n_sequences);

}  // namespace gazebench
