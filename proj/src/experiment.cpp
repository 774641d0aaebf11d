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

#include "gazebench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "gazebench/embed.hpp"
#include "gazebench/manipulate.hpp"

namespace gazebench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kExternalPrefix = "external:";

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_range(const json& j, const char* key, ParameterRange& r) {
  if (!j.contains(key)) return;
  const auto& a = j.at(key);
  if (!a.is_array() || a.size() != 2) throw FormatError(std::string(key) + " must be [lo, hi]");
  r = {a[0].get<double>(), a[1].get<double>()};
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      throw FormatError(std::string("unknown key '") + key + "' in " + where);
  }
}

SyntheticSpec synthetic_from(const json& j, std::uint64_t master_seed) {
  reject_unknown(j,
                 {"n_subjects", "duration_s", "sampling_rate_hz", "saccade_rate_hz",
                  "amplitude_scale", "main_sequence_ms_per_deg", "drift_sd", "tremor_sd",
                  "horizontal_fraction", "profile_skew", "blink_rate_hz", "session_perturbation",
                  "seed", "task"},
                 "synthetic");
  SyntheticSpec s;
  s.seed = master_seed;
  read_if(j, "n_subjects", s.n_subjects);
  read_if(j, "duration_s", s.duration_s);
  read_if(j, "sampling_rate_hz", s.sampling_rate_hz);
  read_range(j, "saccade_rate_hz", s.saccade_rate_hz);
  read_range(j, "amplitude_scale", s.amplitude_scale);
  read_range(j, "main_sequence_ms_per_deg", s.main_sequence_ms_per_deg);
  read_range(j, "drift_sd", s.drift_sd);
  read_range(j, "tremor_sd", s.tremor_sd);
  read_range(j, "horizontal_fraction", s.horizontal_fraction);
  read_range(j, "profile_skew", s.profile_skew);
  read_range(j, "blink_rate_hz", s.blink_rate_hz);
  read_if(j, "session_perturbation", s.session_perturbation);
  read_if(j, "seed", s.seed);
  read_if(j, "task", s.task);
  return s;
}

ordered_json range_json(const ParameterRange& r) { return ordered_json::array({r.lo, r.hi}); }

const char* level_column(Manipulation m) {
  switch (m) {
    case Manipulation::Decimate: return "decimate_hz";
    case Manipulation::Percentage: return "percentage";
    case Manipulation::NumSequences: return "n_sequences";
    case Manipulation::Noise: return "noise_sd";
    case Manipulation::None: break;
  }
  return "level";
}

struct Prepared {
  std::vector<GazeRecording> recordings;  // enrollment then authentication per subject
};

Prepared prepare_recordings(const ExperimentConfig& cfg, const Dataset& data, Condition c) {
  const auto& man = data.manifest;
  std::map<std::string, std::pair<const GazeRecording*, const GazeRecording*>> subjects;
  for (std::size_t i = 0; i < man.recordings.size(); ++i) {
    const auto& e = man.recordings[i];
    if (man.enrollment_selector.matches(e)) subjects[e.subject_id].first = &data.recordings[i];
    if (man.authentication_selector.matches(e)) subjects[e.subject_id].second = &data.recordings[i];
  }
  Prepared out;
  for (const auto& [subject, pair] : subjects) {
    if (!pair.first || !pair.second) continue;
    for (const auto& [rec, sel] : {std::pair{pair.first, &man.enrollment_selector},
                                   std::pair{pair.second, &man.authentication_selector}}) {
      const auto keep = Eigen::Index(std::lround(sel->duration_s * rec->sampling_rate_hz()));
      GazeRecording r = rec->head(keep);
      if (c.kind == Manipulation::Noise) r = inject_noise(r, c.level, cfg.seed);
      if (c.kind == Manipulation::Decimate)
        r = decimate(r, decimation_factor(r.sampling_rate_hz(), c.level));
      out.recordings.push_back(std::move(r));
    }
  }
  if (out.recordings.size() < 6)
    throw InsufficientDataError("fewer than 3 subjects have both enrollment and authentication data");
  return out;
}

void fill_metrics(MetricReport& rep, const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth,
                  KccAggregation aggregation, bool standardize,
                  const Eigen::MatrixXd* intercorr_rows = nullptr) {
  EmbeddingMatrix e = enroll, a = auth;
  if (standardize) {
    const auto dim = enroll.dimension();
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(dim), sq = Eigen::ArrayXd::Zero(dim);
    double count = 0.0;
    for (const auto* m : {&enroll, &auth})
      for (const auto& [key, row] : m->rows()) {
        sum += row.array();
        count += 1.0;
      }
    const Eigen::ArrayXd mean = sum / count;
    for (const auto* m : {&enroll, &auth})
      for (const auto& [key, row] : m->rows()) sq += (row.array() - mean).square();
    const Eigen::ArrayXd sd = (sq / count).sqrt();
    auto scale = [&](const EmbeddingMatrix& in) {
      EmbeddingMatrix out(dim);
      for (const auto& [key, row] : in.rows()) {
        Eigen::ArrayXd z = (row.array() - mean) / sd;
        z = (sd > 0.0).select(z, 0.0);
        out.insert(key.first, key.second, z.matrix());
      }
      return out;
    };
    e = scale(enroll);
    a = scale(auth);
  }
  rep.eer = eer(build_score_sets(e, a));
  rep.kcc = temporal_persistence(enroll, auth, aggregation).mean_w;
  const auto inter = intercorr_rows ? intercorrelation(*intercorr_rows) : intercorrelation(enroll);
  rep.intercorr_mean_abs = inter.mean_abs;
  rep.intercorr_sd = inter.sd_abs;
  rep.n_subjects = int(enroll.size());
}

MetricReport run_external(const ExperimentConfig& cfg, Condition c, MetricReport rep) {
  const std::string dir = cfg.embedder.substr(kExternalPrefix.size());
  const auto path = (std::filesystem::path(dir) / (condition_tag(c) + ".csv")).string();
  if (cfg.intercorr_population == IntercorrPopulation::EnrollmentSequences)
    throw ArgumentError("external embeddings hold centroids only; use enrollment_centroids");
  const auto m = read_embeddings(path);
  fill_metrics(rep, m.select(Session::S1), m.select(Session::S2), cfg.kcc_aggregation,
               cfg.standardize_embeddings);
  return rep;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void ExperimentConfig::check() const {
  if (!manifest_path && !synthetic) throw ArgumentError("config needs a data or synthetic section");
  if (manifest_path && synthetic) throw ArgumentError("config has both data and synthetic sections");
  preprocess.check();
  if (synthetic) synthetic->check();
  if (embedder != "stat" && embedder != "seeded-conv" && !embedder.starts_with(kExternalPrefix))
    throw ArgumentError("unknown embedder '" + embedder + "'");
  for (double hz : grids.decimate_hz)
    if (!(hz > 0.0)) throw ArgumentError("decimation levels must be positive");
  for (double p : grids.percentage)
    if (!(p > 0.0 && p <= 100.0)) throw ArgumentError("percentage levels must lie in (0, 100]");
  for (int n : grids.n_sequences)
    if (n < 1) throw ArgumentError("sequence counts must be >= 1");
  for (double s : grids.noise_sd)
    if (!(s >= 0.0)) throw ArgumentError("noise levels must be non-negative");
  if (grids.decimate_hz.empty() && grids.percentage.empty() && grids.n_sequences.empty() &&
      grids.noise_sd.empty())
    throw ArgumentError("every manipulation grid is empty");
}

ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(json_text);
    reject_unknown(j,
                   {"data", "synthetic", "preprocess", "embedder", "grids", "seed", "out_dir",
                    "kcc_aggregation", "intercorr_population", "standardize_embeddings"},
                   "config");
    read_if(j, "seed", cfg.seed);
    read_if(j, "out_dir", cfg.out_dir);
    read_if(j, "embedder", cfg.embedder);
    read_if(j, "standardize_embeddings", cfg.standardize_embeddings);
    if (j.contains("kcc_aggregation")) {
      const auto agg = j.at("kcc_aggregation").get<std::string>();
      if (agg == "mean")
        cfg.kcc_aggregation = KccAggregation::Mean;
      else if (agg == "median")
        cfg.kcc_aggregation = KccAggregation::Median;
      else
        throw FormatError("kcc_aggregation must be mean or median");
    }
    if (j.contains("intercorr_population")) {
      const auto pop = j.at("intercorr_population").get<std::string>();
      if (pop == "enrollment_centroids")
        cfg.intercorr_population = IntercorrPopulation::EnrollmentCentroids;
      else if (pop == "enrollment_sequences")
        cfg.intercorr_population = IntercorrPopulation::EnrollmentSequences;
      else
        throw FormatError("intercorr_population must be enrollment_centroids or enrollment_sequences");
    }
    if (j.contains("data")) {
      const auto& d = j.at("data");
      reject_unknown(d, {"manifest"}, "data");
      std::filesystem::path p = d.at("manifest").get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      cfg.manifest_path = p.string();
    }
    if (j.contains("synthetic")) cfg.synthetic = synthetic_from(j.at("synthetic"), cfg.seed);
    if (j.contains("preprocess")) {
      const auto& p = j.at("preprocess");
      reject_unknown(p,
                     {"h_bounds", "v_bounds", "sg_window", "sg_polyorder", "clamp_deg_per_s",
                      "sequence_duration_s", "sequences_per_stream"},
                     "preprocess");
      auto& pp = cfg.preprocess;
      if (p.contains("h_bounds")) pp.h_bounds = {p["h_bounds"][0], p["h_bounds"][1]};
      if (p.contains("v_bounds")) pp.v_bounds = {p["v_bounds"][0], p["v_bounds"][1]};
      read_if(p, "sg_window", pp.sg_window);
      read_if(p, "sg_polyorder", pp.sg_polyorder);
      read_if(p, "clamp_deg_per_s", pp.clamp_deg_per_s);
      read_if(p, "sequence_duration_s", pp.sequence_duration_s);
      read_if(p, "sequences_per_stream", pp.sequences_per_stream);
    }
    if (j.contains("grids")) {
      const auto& g = j.at("grids");
      reject_unknown(g, {"decimate_hz", "percentage", "n_sequences", "noise_sd"}, "grids");
      read_if(g, "decimate_hz", cfg.grids.decimate_hz);
      read_if(g, "percentage", cfg.grids.percentage);
      read_if(g, "n_sequences", cfg.grids.n_sequences);
      read_if(g, "noise_sd", cfg.grids.noise_sd);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  cfg.check();
  return cfg;
}

ExperimentConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  if (cfg.manifest_path) j["data"] = {{"manifest", *cfg.manifest_path}};
  if (cfg.synthetic) {
    const auto& s = *cfg.synthetic;
    j["synthetic"] = {{"n_subjects", s.n_subjects},
                      {"duration_s", s.duration_s},
                      {"sampling_rate_hz", s.sampling_rate_hz},
                      {"saccade_rate_hz", range_json(s.saccade_rate_hz)},
                      {"amplitude_scale", range_json(s.amplitude_scale)},
                      {"main_sequence_ms_per_deg", range_json(s.main_sequence_ms_per_deg)},
                      {"drift_sd", range_json(s.drift_sd)},
                      {"tremor_sd", range_json(s.tremor_sd)},
                      {"horizontal_fraction", range_json(s.horizontal_fraction)},
                      {"profile_skew", range_json(s.profile_skew)},
                      {"blink_rate_hz", range_json(s.blink_rate_hz)},
                      {"session_perturbation", s.session_perturbation},
                      {"seed", s.seed},
                      {"task", s.task}};
  }
  const auto& p = cfg.preprocess;
  j["preprocess"] = {{"h_bounds", {p.h_bounds.first, p.h_bounds.second}},
                     {"v_bounds", {p.v_bounds.first, p.v_bounds.second}},
                     {"sg_window", p.sg_window},
                     {"sg_polyorder", p.sg_polyorder},
                     {"clamp_deg_per_s", p.clamp_deg_per_s},
                     {"sequence_duration_s", p.sequence_duration_s},
                     {"sequences_per_stream", p.sequences_per_stream}};
  j["embedder"] = cfg.embedder;
  j["grids"] = {{"decimate_hz", cfg.grids.decimate_hz},
                {"percentage", cfg.grids.percentage},
                {"n_sequences", cfg.grids.n_sequences},
                {"noise_sd", cfg.grids.noise_sd}};
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  j["kcc_aggregation"] = cfg.kcc_aggregation == KccAggregation::Median ? "median" : "mean";
  j["intercorr_population"] =
      cfg.intercorr_population == IntercorrPopulation::EnrollmentSequences ? "enrollment_sequences"
                                                                           : "enrollment_centroids";
  j["standardize_embeddings"] = cfg.standardize_embeddings;
  return j.dump(2);
}

Dataset make_dataset(const ExperimentConfig& cfg) {
  if (cfg.synthetic) return generate_synthetic(*cfg.synthetic);
  if (cfg.embedder.starts_with(kExternalPrefix)) return {};
  return load_dataset(read_manifest(*cfg.manifest_path));
}

std::string condition_tag(Condition c) {
  return std::string(to_string(c.kind)) + "_" + format_real(c.level);
}

std::vector<Condition> sweep_conditions(const ExperimentConfig& cfg) {
  std::vector<Condition> out;
  auto add = [&](Manipulation kind, std::vector<double> levels) {
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    for (double l : levels) out.push_back({kind, l});
  };
  add(Manipulation::Decimate, cfg.grids.decimate_hz);
  add(Manipulation::Percentage, cfg.grids.percentage);
  add(Manipulation::NumSequences,
      std::vector<double>(cfg.grids.n_sequences.begin(), cfg.grids.n_sequences.end()));
  add(Manipulation::Noise, cfg.grids.noise_sd);
  return out;
}

namespace {

// Per-sequence embeddings of every prepared recording for one signal-level
// condition, before any centroid is formed.
struct EmbeddedCorpus {
  std::vector<std::pair<std::string, Session>> keys;
  std::vector<std::vector<Eigen::VectorXd>> per_sequence;
  NormalizationStats stats;
  Eigen::Index dimension = kEmbeddingDim;
};

EmbeddedCorpus embed_corpus(const ExperimentConfig& cfg, const Dataset& data, Condition c,
                            int max_sequences) {
  const auto provider = make_provider(cfg.embedder, cfg.seed);
  EmbeddedCorpus out;
  out.dimension = provider->dimension();
  std::vector<std::vector<Sequence>> raw;
  {
    Prepared prepared = prepare_recordings(cfg, data, c);
    for (const auto& r : prepared.recordings) {
      raw.push_back(velocity_sequences(r, cfg.preprocess));
      out.keys.emplace_back(r.subject_id(), r.session());
    }
  }
  out.stats = fit_normalization(std::span<const std::vector<Sequence>>(raw));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SequenceBatch batch = normalize_and_fill(raw[i], out.stats, out.keys[i].first,
                                             out.keys[i].second, cfg.preprocess.sequence_duration_s);
    std::vector<Sequence>().swap(raw[i]);
    if (c.kind == Manipulation::Percentage)
      for (auto& s : batch.sequences) s = percentage_truncate(s, c.level);
    const int n = std::min<int>(max_sequences, int(batch.sequences.size()));
    out.per_sequence.push_back(
        std::move(embed_batches(*provider, std::span<const SequenceBatch>(&batch, 1), n)[0]));
  }
  return out;
}

void score_corpus(const ExperimentConfig& cfg, const Dataset& data, const EmbeddedCorpus& corpus,
                  int n_sequences, MetricReport& rep) {
  rep.norm_mean = corpus.stats.mean;
  rep.norm_sd = corpus.stats.sd;
  EmbeddingMatrix all(corpus.dimension);
  for (std::size_t i = 0; i < corpus.keys.size(); ++i) {
    const auto& seqs = corpus.per_sequence[i];
    if (seqs.size() < std::size_t(n_sequences))
      throw ArgumentError("subject " + corpus.keys[i].first + " (" +
                          std::string(to_string(corpus.keys[i].second)) + ") has " +
                          std::to_string(seqs.size()) + " sequences, needs " +
                          std::to_string(n_sequences));
    all.insert(corpus.keys[i].first, corpus.keys[i].second,
               centroid(std::span<const Eigen::VectorXd>(seqs.data(), std::size_t(n_sequences))));
  }
  const Session enroll_session = data.manifest.enrollment_selector.session;
  std::optional<Eigen::MatrixXd> sequence_rows;
  if (cfg.intercorr_population == IntercorrPopulation::EnrollmentSequences) {
    Eigen::Index count = 0;
    for (std::size_t i = 0; i < corpus.keys.size(); ++i)
      if (corpus.keys[i].second == enroll_session) count += n_sequences;
    sequence_rows.emplace(count, corpus.dimension);
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < corpus.keys.size(); ++i)
      if (corpus.keys[i].second == enroll_session)
        for (int k = 0; k < n_sequences; ++k)
          sequence_rows->row(r++) = corpus.per_sequence[i][std::size_t(k)].transpose();
  }
  fill_metrics(rep, all.select(enroll_session),
               all.select(data.manifest.authentication_selector.session), cfg.kcc_aggregation,
               cfg.standardize_embeddings, sequence_rows ? &*sequence_rows : nullptr);
}

int condition_sequences(const ExperimentConfig& cfg, Condition c) {
  if (c.kind != Manipulation::NumSequences) return cfg.preprocess.sequences_per_stream;
  if (c.level < 1.0 || c.level != std::floor(c.level))
    throw ArgumentError("sequence count must be a positive integer");
  return int(c.level);
}

template <typename Body>
MetricReport guarded(const ExperimentConfig& cfg, Condition c, Body&& body) {
  MetricReport rep;
  rep.manipulation = c.kind;
  rep.level = c.level;
  rep.seed = cfg.seed;
  try {
    body(rep);
  } catch (const Error& e) {
    rep.error = e.what();
  } catch (const std::exception& e) {
    rep.error = std::string("internal error: ") + e.what();
  }
  return rep;
}

// True when the condition leaves the signal untouched, so its embeddings
// equal the baseline's.
bool is_identity(const Dataset& data, Condition c) {
  switch (c.kind) {
    case Manipulation::None:
    case Manipulation::NumSequences: return true;
    case Manipulation::Noise: return c.level == 0.0;
    case Manipulation::Percentage: return c.level == 100.0;
    case Manipulation::Decimate:
      if (data.recordings.empty()) return false;
      for (const auto& r : data.recordings) {
        try {
          if (decimation_factor(r.sampling_rate_hz(), c.level) != 1) return false;
        } catch (const Error&) {
          return false;
        }
      }
      return true;
  }
  return false;
}

}  // namespace

PreprocessedCorpus preprocess_dataset(const ExperimentConfig& cfg, const Dataset& data,
                                      Condition c) {
  Prepared prepared = prepare_recordings(cfg, data, c);
  std::vector<std::vector<Sequence>> raw;
  for (const auto& r : prepared.recordings) raw.push_back(velocity_sequences(r, cfg.preprocess));
  PreprocessedCorpus out;
  out.stats = fit_normalization(std::span<const std::vector<Sequence>>(raw));
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = prepared.recordings[i];
    SequenceBatch batch = normalize_and_fill(raw[i], out.stats, r.subject_id(), r.session(),
                                             cfg.preprocess.sequence_duration_s);
    if (c.kind == Manipulation::Percentage)
      for (auto& s : batch.sequences) s = percentage_truncate(s, c.level);
    out.batches.push_back(std::move(batch));
  }
  return out;
}

EmbeddingMatrix embed_dataset(const ExperimentConfig& cfg, const Dataset& data, Condition c) {
  const int n = condition_sequences(cfg, c);
  const EmbeddedCorpus corpus = embed_corpus(cfg, data, c, n);
  EmbeddingMatrix out(corpus.dimension);
  for (std::size_t i = 0; i < corpus.keys.size(); ++i) {
    const auto& seqs = corpus.per_sequence[i];
    const auto take = std::min(seqs.size(), std::size_t(n));
    out.insert(corpus.keys[i].first, corpus.keys[i].second,
               centroid(std::span<const Eigen::VectorXd>(seqs.data(), take)));
  }
  return out;
}

MetricReport run_condition(const ExperimentConfig& cfg, const Dataset& data, Condition c) {
  return guarded(cfg, c, [&](MetricReport& rep) {
    if (cfg.embedder.starts_with(kExternalPrefix)) {
      rep = run_external(cfg, c, rep);
      return;
    }
    const int n = condition_sequences(cfg, c);
    score_corpus(cfg, data, embed_corpus(cfg, data, c, n), n, rep);
  });
}

MetricReport evaluate_embeddings(const EmbeddingMatrix& enroll, const EmbeddingMatrix& auth,
                                 KccAggregation aggregation, bool standardize) {
  MetricReport rep;
  fill_metrics(rep, enroll, auth, aggregation, standardize);
  return rep;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const Dataset& data, int jobs) {
  const auto conditions = sweep_conditions(cfg);
  std::vector<MetricReport> reports(conditions.size());

  // Conditions that leave the signal untouched share one embedding pass; every
  // other condition is its own task.
  const bool external = cfg.embedder.starts_with(kExternalPrefix);
  std::vector<std::size_t> shared, solo;
  for (std::size_t i = 0; i < conditions.size(); ++i)
    (!external && is_identity(data, conditions[i]) ? shared : solo).push_back(i);

  std::optional<EmbeddedCorpus> baseline;
  std::string baseline_error;
  auto run_task = [&](std::size_t task) {
    if (task < solo.size()) {
      reports[solo[task]] = run_condition(cfg, data, conditions[solo[task]]);
      return;
    }
    try {
      baseline = embed_corpus(cfg, data, Condition{}, cfg.preprocess.sequences_per_stream);
    } catch (const Error& e) {
      baseline_error = e.what();
    } catch (const std::exception& e) {
      baseline_error = std::string("internal error: ") + e.what();
    }
  };
  const std::size_t tasks = solo.size() + (shared.empty() ? 0 : 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) run_task(t);
  };
  const int workers = std::max(1, std::min<int>(jobs, int(tasks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::size_t i : shared) {
    reports[i] = guarded(cfg, conditions[i], [&](MetricReport& rep) {
      if (!baseline) throw DegenerateError(baseline_error);
      score_corpus(cfg, data, *baseline, condition_sequences(cfg, conditions[i]), rep);
    });
  }
  SweepResult out;
  out.fits = sweep_fits(reports);
  out.reports = std::move(reports);
  return out;
}

std::vector<FitRow> sweep_fits(const std::vector<MetricReport>& reports) {
  std::vector<FitRow> fits;
  auto add_fit = [&](const std::string& xn, const std::string& yn, FitModel model,
                     const std::vector<double>& xs, const std::vector<double>& ys) {
    FitRow row{xn, yn, std::string(to_string(model)), std::nan(""), std::nan(""), std::nan(""),
               int(xs.size())};
    try {
      const Eigen::Map<const Eigen::VectorXd> x(xs.data(), Eigen::Index(xs.size()));
      const Eigen::Map<const Eigen::VectorXd> y(ys.data(), Eigen::Index(ys.size()));
      const FitResult f = fit(model, x, y);
      row.a = f.a;
      row.b = f.b;
      row.r2 = f.r2;
    } catch (const Error&) {
    }
    fits.push_back(std::move(row));
  };

  for (Manipulation kind : {Manipulation::Decimate, Manipulation::Percentage,
                            Manipulation::NumSequences, Manipulation::Noise}) {
    std::vector<double> level, kcc, eer_values;
    bool present = false;
    for (const auto& r : reports) {
      if (r.manipulation != kind) continue;
      present = true;
      if (!r.ok()) continue;
      level.push_back(r.level);
      kcc.push_back(r.kcc);
      eer_values.push_back(r.eer);
    }
    if (!present) continue;
    const FitModel model = kind == Manipulation::Noise ? FitModel::Linear : FitModel::Log;
    add_fit(level_column(kind), "kcc", model, level, kcc);
    add_fit(level_column(kind), "eer", model, level, eer_values);
  }
  std::vector<double> kcc, eer_values;
  for (const auto& r : reports)
    if (r.ok()) {
      kcc.push_back(r.kcc);
      eer_values.push_back(r.eer);
    }
  add_fit("kcc", "eer", FitModel::Linear, kcc, eer_values);
  return fits;
}

void write_sweep(const SweepResult& r, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_reports(r.reports, (std::filesystem::path(out_dir) / "report.csv").string());
  write_fits(r.fits, (std::filesystem::path(out_dir) / "fits.csv").string());
}

PrecisionTable subject_spatial_precision(const Dataset& data, double noise_sd, std::uint64_t seed) {
  std::map<std::string, std::pair<std::vector<double>, std::string>> per_subject;
  for (const auto& rec : data.recordings) {
    auto& [values, warning] = per_subject[rec.subject_id()];
    try {
      values.push_back(spatial_precision(inject_noise(rec, noise_sd, seed)));
    } catch (const Error& e) {
      if (!warning.empty()) warning += "; ";
      warning += std::string(to_string(rec.session())) + " " + rec.task() + ": " + e.what();
    }
  }
  PrecisionTable t;
  std::vector<double> medians;
  for (auto& [subject, entry] : per_subject) {
    SubjectPrecision sp;
    sp.subject_id = subject;
    sp.n_recordings = int(entry.first.size());
    sp.warning = entry.second;
    sp.precision_deg = entry.first.empty() ? std::nan("") : median_of(entry.first);
    if (!entry.first.empty()) medians.push_back(sp.precision_deg);
    t.subjects.push_back(std::move(sp));
  }
  t.dataset_median = medians.empty() ? std::nan("") : median_of(medians);
  return t;
}

void write_precision(const PrecisionTable& t, const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "subject_id,n_recordings,precision_deg,warning\n";
  for (const auto& s : t.subjects) {
    std::string w = s.warning;
    std::replace(w.begin(), w.end(), ',', ';');
    out << s.subject_id << ',' << s.n_recordings << ',' << format_real(s.precision_deg) << ','
        << w << '\n';
  }
  out << "dataset_median,," << format_real(t.dataset_median) << ",\n";
}

}  // namespace gazebench
