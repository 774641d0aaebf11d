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

#include <doctest.h>

#include <random>

#include "gazebench/embed.hpp"

using namespace gazebench;

namespace {

Sequence random_sequence(std::uint64_t seed, Eigen::Index n = 5000) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  Sequence s(2, n);
  for (Eigen::Index i = 0; i < n; ++i) s(0, i) = d(rng), s(1, i) = d(rng);
  return s;
}

SequenceBatch batch(const std::string& id, Session ses, int count, std::uint64_t seed) {
  SequenceBatch b;
  b.subject_id = id;
  b.session = ses;
  b.samples_per_sequence = 1000;
  for (int i = 0; i < count; ++i) b.sequences.push_back(random_sequence(seed + std::uint64_t(i), 1000));
  return b;
}

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("seeded conv maps 2x5000 to 128 finite values") {
    SeededConvEmbedder e(3);
    const auto v = e.embed(random_sequence(1));
    CHECK(v.size() == 128);
    CHECK(v.allFinite());
    CHECK(e.dimension() == 128);
    CHECK(e.deterministic());
  }

  TEST_CASE("seeded conv is deterministic per seed") {
    const auto s = random_sequence(9);
    CHECK(SeededConvEmbedder(3).embed(s) == SeededConvEmbedder(3).embed(s));
    CHECK_FALSE(SeededConvEmbedder(3).embed(s) == SeededConvEmbedder(4).embed(s));
  }

  TEST_CASE("seeded conv accepts other lengths") {
    SeededConvEmbedder e(1);
    CHECK(e.embed(random_sequence(2, 1250)).size() == 128);
    CHECK(e.embed(Sequence::Zero(2, 64)).allFinite());
  }

  TEST_CASE("stat features of a zero sequence") {
    StatFeatureEmbedder e;
    const auto v = e.embed(Sequence::Zero(2, 5000));
    CHECK(v.size() == 128);
    CHECK(v.allFinite());
    const auto block = StatFeatureEmbedder::feature_block(Eigen::ArrayXd::Zero(5000));
    CHECK(block.size() == StatFeatureEmbedder::kBlockSize);
    CHECK(block[0] == 0.0);  // mean
    CHECK(block[1] == 0.0);  // sd
    CHECK(block.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("stat features: leading moments") {
    Eigen::ArrayXd x(4);
    x << 1, 2, 3, 4;
    const auto f = StatFeatureEmbedder::feature_block(x);
    CHECK(f[0] == doctest::Approx(2.5));
    CHECK(f[1] == doctest::Approx(std::sqrt(1.25)));
    CHECK(f[2] == doctest::Approx(0.0));
  }

  TEST_CASE("stat embedding sees time reversal") {
    StatFeatureEmbedder e;
    const auto s = random_sequence(4);
    const Sequence r = s.rowwise().reverse();
    CHECK_FALSE(e.embed(s).isApprox(e.embed(r)));
    CHECK(e.embed(s) == e.embed(s));
  }

  TEST_CASE("length precondition") {
    StatFeatureEmbedder e;
    CHECK_THROWS_AS(embed_sequence(e, Sequence::Zero(2, kMinSequenceLength - 1)), ArgumentError);
    CHECK(embed_sequence(e, Sequence::Zero(2, kMinSequenceLength)).size() == 128);
  }

  TEST_CASE("providers by name") {
    CHECK(make_provider("stat", 1)->name() == "stat");
    CHECK(make_provider("seeded-conv", 1)->name() == "seeded-conv");
    CHECK_THROWS_AS(make_provider("mystery", 1), ArgumentError);
  }

  TEST_CASE("centroid examples") {
    const Eigen::VectorXd e = Eigen::VectorXd::LinSpaced(128, -1, 1);
    std::vector<Eigen::VectorXd> three{e, e, e};
    CHECK(centroid(three).isApprox(e));
    std::vector<Eigen::VectorXd> opposite{e, -e};
    CHECK(centroid(opposite).norm() == 0.0);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(128), b = a;
    a[0] = 1;
    b[1] = 1;
    std::vector<Eigen::VectorXd> units{a, b};
    const auto c = centroid(units);
    CHECK(c[0] == 0.5);
    CHECK(c[1] == 0.5);
    CHECK(c.tail(126).norm() == 0.0);
    CHECK_THROWS_AS(centroid(std::span<const Eigen::VectorXd>()), ArgumentError);
  }

  TEST_CASE("centroid equals the coordinate mean of 12 embeddings") {
    SeededConvEmbedder e(5);
    std::vector<Eigen::VectorXd> embs;
    for (int i = 0; i < 12; ++i) embs.push_back(e.embed(random_sequence(std::uint64_t(100 + i), 500)));
    const auto c = centroid(embs);
    for (Eigen::Index d = 0; d < 128; ++d) {
      long double acc = 0;
      for (const auto& v : embs) acc += v[d];
      CHECK(std::abs(double(acc / 12) - c[d]) <= 1e-12);
    }
  }

  TEST_CASE("embedding matrix from batches") {
    StatFeatureEmbedder e;
    std::vector<SequenceBatch> batches{batch("a", Session::S1, 3, 1), batch("a", Session::S2, 3, 10),
                                       batch("b", Session::S1, 3, 1)};
    const auto one = build_embedding_matrix(e, batches, 1);
    CHECK(one.size() == 3);
    CHECK(one.at("a", Session::S1) == e.embed(batches[0].sequences[0]));
    const auto all = build_embedding_matrix(e, batches, 3);
    CHECK(all.at("a", Session::S1) == all.at("b", Session::S1));
    CHECK_FALSE(all.at("a", Session::S1) == all.at("a", Session::S2));
    CHECK_THROWS_AS(build_embedding_matrix(e, batches, 4), ArgumentError);
  }
}
