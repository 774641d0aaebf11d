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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gazebench/experiment.hpp"

using namespace gazebench;
namespace fs = std::filesystem;

namespace {

// Regression targets for the frozen 60-subject fixture (seed 7), recorded from
// the tuning run: baseline EER 0.0898, KCC 0.847.
constexpr double kBaselineEer = 0.0898;
constexpr double kBaselineKcc = 0.847;

ExperimentConfig synthetic_config(int subjects, double seconds = 65.0) {
  ExperimentConfig cfg;
  SyntheticSpec s;
  s.n_subjects = subjects;
  s.duration_s = seconds;
  cfg.synthetic = s;
  return cfg;
}

const Dataset& fixture60() {
  static const Dataset d = make_dataset(synthetic_config(60));
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("config round trip and strict keys") {
    auto cfg = parse_config(R"({"synthetic": {"n_subjects": 5}, "seed": 3,
                                "grids": {"noise_sd": [0, 1]}, "kcc_aggregation": "median"})");
    CHECK(cfg.seed == 3);
    REQUIRE(cfg.synthetic);
    CHECK(cfg.synthetic->n_subjects == 5);
    CHECK(cfg.grids.noise_sd == std::vector<double>{0, 1});
    CHECK(cfg.kcc_aggregation == KccAggregation::Median);
    const auto again = parse_config(config_to_json(cfg));
    CHECK(config_to_json(again) == config_to_json(cfg));
    CHECK_THROWS_AS(parse_config(R"({"synthetic": {}, "sed": 3})"), FormatError);
    CHECK_THROWS_AS(parse_config("{not json"), FormatError);
    CHECK_THROWS_AS(parse_config(R"({"seed": 3})"), ArgumentError);
    CHECK_THROWS_AS(parse_config(R"({"synthetic": {}, "embedder": "magic"})"), ArgumentError);
  }

  TEST_CASE("sweep conditions are ordered and complete") {
    ExperimentConfig cfg = synthetic_config(3);
    const auto cs = sweep_conditions(cfg);
    CHECK(cs.size() == 8 + 8 + 12 + 10);
    for (std::size_t i = 1; i < cs.size(); ++i)
      CHECK((cs[i - 1].kind < cs[i].kind ||
             (cs[i - 1].kind == cs[i].kind && cs[i - 1].level < cs[i].level)));
    CHECK(condition_tag({Manipulation::Noise, 0.5}) == "noise_0.5");
  }

  TEST_CASE("identical sessions evaluate perfectly") {
    EmbeddingMatrix e(4), a(4);
    for (int i = 0; i < 5; ++i) {
      Eigen::VectorXd v(4);
      v << i, i * i, -i, 10 - 3 * i * i;
      v += Eigen::VectorXd::Constant(4, 0.5);
      e.insert("s" + std::to_string(i), Session::S1, v);
      a.insert("s" + std::to_string(i), Session::S2, v);
    }
    const auto r = evaluate_embeddings(e, a);
    CHECK(r.eer == 0.0);
    CHECK(r.kcc == doctest::Approx(1.0));
    CHECK(r.n_subjects == 5);
  }

  TEST_CASE("baseline regression on the frozen fixture") {
    const auto cfg = synthetic_config(60);
    const auto base = run_condition(cfg, fixture60(), {Manipulation::Noise, 0.0});
    REQUIRE(base.ok());
    CHECK(base.eer < 0.15);
    CHECK(base.kcc > 0.7);
    CHECK(base.eer == doctest::Approx(kBaselineEer).epsilon(0.01));
    CHECK(base.kcc == doctest::Approx(kBaselineKcc).epsilon(0.01));
    CHECK(base.n_subjects == 60);

    const auto noisy = run_condition(cfg, fixture60(), {Manipulation::Noise, 2.0});
    CHECK(noisy.eer > base.eer);
    const auto one = run_condition(cfg, fixture60(), {Manipulation::NumSequences, 1});
    CHECK(one.kcc <= base.kcc);
  }

  TEST_CASE("too-short decimation becomes an error row") {
    const auto cfg = synthetic_config(4, 62.0);
    const auto data = make_dataset(cfg);
    const auto r = run_condition(cfg, data, {Manipulation::Decimate, 10});
    CHECK_FALSE(r.ok());
    CHECK(r.error.find("shorter") != std::string::npos);
    CHECK(is_missing(r.eer));
    const auto bad = run_condition(cfg, data, {Manipulation::NumSequences, 13});
    CHECK_FALSE(bad.ok());
  }

  TEST_CASE("sweep counts, pooled fit sign and determinism across workers") {
    auto cfg = synthetic_config(8, 62.0);
    cfg.grids.percentage = {100, 5};
    cfg.grids.n_sequences = {1, 12};
    cfg.grids.noise_sd = {0, 2};
    const auto data = make_dataset(cfg);
    const auto one = run_sweep(cfg, data, 1);
    CHECK(one.reports.size() == 8 + 2 + 2 + 2);
    int decimate_rows = 0;
    for (const auto& r : one.reports) decimate_rows += r.manipulation == Manipulation::Decimate;
    CHECK(decimate_rows == 8);
    int decimate_fits = 0;
    const FitRow* pooled = nullptr;
    for (const auto& f : one.fits) {
      decimate_fits += f.x_name == "decimate_hz";
      if (f.x_name == "kcc") pooled = &f;
    }
    CHECK(decimate_fits == 2);
    REQUIRE(pooled);
    CHECK(pooled->a < 0);

    const auto four = run_sweep(cfg, data, 4);
    const auto a = fs::temp_directory_path() / "gazebench_sweep_1";
    const auto b = fs::temp_directory_path() / "gazebench_sweep_4";
    write_sweep(one, a.string());
    write_sweep(four, b.string());
    CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
    CHECK(slurp(a / "fits.csv") == slurp(b / "fits.csv"));
  }

  TEST_CASE("shared baseline gives the same rows as direct runs") {
    auto cfg = synthetic_config(5, 62.0);
    cfg.grids.decimate_hz = {1000};
    cfg.grids.percentage = {100};
    cfg.grids.n_sequences = {3};
    cfg.grids.noise_sd = {0};
    const auto data = make_dataset(cfg);
    const auto sweep = run_sweep(cfg, data, 1);
    for (const auto& r : sweep.reports) {
      const auto direct = run_condition(cfg, data, {r.manipulation, r.level});
      CHECK(direct.eer == r.eer);
      CHECK(direct.kcc == r.kcc);
      CHECK(direct.intercorr_mean_abs == r.intercorr_mean_abs);
    }
  }

  TEST_CASE("external embeddings") {
    const auto dir = fs::temp_directory_path() / "gazebench_external";
    fs::remove_all(dir);
    auto cfg = synthetic_config(5, 62.0);
    const auto data = make_dataset(cfg);
    const Condition c{Manipulation::Noise, 0.5};
    const auto m = embed_dataset(cfg, data, c);
    fs::create_directories(dir);
    write_embeddings(m, (dir / (condition_tag(c) + ".csv")).string());
    const auto direct = run_condition(cfg, data, c);
    cfg.embedder = "external:" + dir.string();
    const auto ext = run_condition(cfg, data, c);
    REQUIRE(ext.ok());
    CHECK(ext.eer == direct.eer);
    CHECK(ext.kcc == direct.kcc);
    const auto missing = run_condition(cfg, data, {Manipulation::Noise, 1.0});
    CHECK_FALSE(missing.ok());
  }

  TEST_CASE("intercorrelation over enrollment sequences") {
    auto cfg = synthetic_config(4, 62.0);
    const auto data = make_dataset(cfg);
    const Condition c{Manipulation::NumSequences, 3};
    const auto centroids = run_condition(cfg, data, c);
    cfg.intercorr_population = IntercorrPopulation::EnrollmentSequences;
    CHECK(parse_config(config_to_json(cfg)).intercorr_population ==
          IntercorrPopulation::EnrollmentSequences);
    const auto sequences = run_condition(cfg, data, c);
    REQUIRE(sequences.ok());
    CHECK(sequences.eer == centroids.eer);
    CHECK(sequences.kcc == centroids.kcc);
    CHECK(sequences.intercorr_mean_abs != centroids.intercorr_mean_abs);
    CHECK(sequences.intercorr_mean_abs > 0.0);
    CHECK(sequences.intercorr_mean_abs < 1.0);
  }

  TEST_CASE("preprocess_dataset shapes") {
    const auto cfg = synthetic_config(3, 62.0);
    const auto corpus = preprocess_dataset(cfg, make_dataset(cfg));
    CHECK(corpus.batches.size() == 6);
    CHECK(corpus.batches[0].sequences.size() == 12);
    CHECK(corpus.batches[0].sequences[0].cols() == 5000);
  }

  TEST_CASE("spatial precision of the synthetic fixture") {
    const auto clean = subject_spatial_precision(fixture60(), 0.0, 1);
    CHECK(clean.subjects.size() == 60);
    CHECK(clean.dataset_median < 0.05);
    const auto one = subject_spatial_precision(fixture60(), 1.0, 1);
    CHECK(one.dataset_median >= 1.05);
    CHECK(one.dataset_median <= 1.25);
    const auto quarter = subject_spatial_precision(fixture60(), 0.25, 1);
    CHECK(quarter.dataset_median >= 0.26);
    CHECK(quarter.dataset_median <= 0.32);
  }
}
