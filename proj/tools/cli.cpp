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

#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazebench/experiment.hpp"
#include "gazebench/fitting.hpp"
#include "gazebench/io.hpp"
#include "gazebench/manipulate.hpp"

namespace gazebench {
namespace {

namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Options {
  std::string config;
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string enroll;
  std::string auth;
  double noise_sd = 0.0;
  std::string report;
  std::string x = "level";
  std::string y = "eer";
  std::string model = "log";
  std::string embedder;
  std::string kind;
  std::optional<double> level;
  int subjects = 0;
};

std::string out_path(const Options& o, const std::string& name) {
  const fs::path p = fs::path(o.out) / name;
  fs::create_directories(p.parent_path());
  return p.string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("failed writing '" + path + "'");
}

ExperimentConfig base_config(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : read_config(o.config);
  if (!o.manifest.empty()) {
    cfg.manifest_path = o.manifest;
    cfg.synthetic.reset();
  }
  if (o.seed) {
    cfg.seed = *o.seed;
    if (cfg.synthetic) cfg.synthetic->seed = *o.seed;
  }
  if (!o.embedder.empty()) cfg.embedder = o.embedder;
  return cfg;
}

Dataset dataset_from(const Options& o) {
  if (o.manifest.empty() && o.config.empty())
    throw ArgumentError("--manifest or --config is required");
  return make_dataset(base_config(o));
}

Condition condition_from(const Options& o) {
  if (o.kind.empty()) return {};
  if (!o.level) throw ArgumentError("--kind needs --level");
  return Condition{parse_manipulation(o.kind), *o.level};
}

int cmd_gen_synthetic(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : read_config(o.config);
  SyntheticSpec spec = cfg.synthetic.value_or(SyntheticSpec{});
  if (o.seed) spec.seed = *o.seed;
  if (o.subjects > 0) spec.n_subjects = o.subjects;
  spec.check();
  const Dataset d = generate_synthetic(spec);
  write_dataset(d, o.out);
  std::cout << "gen-synthetic: " << spec.n_subjects << " subjects, " << d.recordings.size()
            << " recordings -> " << (fs::path(o.out) / "manifest.json").string() << '\n';
  return kOk;
}

int cmd_preprocess(const Options& o) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset data = dataset_from(o);
  const PreprocessedCorpus corpus = preprocess_dataset(cfg, data, condition_from(o));
  std::size_t n_sequences = 0;
  for (const auto& b : corpus.batches) {
    std::ofstream f(out_path(o, "sequences/" + b.subject_id + "_" +
                                    std::string(to_string(b.session)) + ".csv"));
    if (!f) throw IoError("cannot write sequences for " + b.subject_id);
    f << "sequence,sample,vx,vy\n";
    for (std::size_t s = 0; s < b.sequences.size(); ++s)
      for (Eigen::Index i = 0; i < b.sequences[s].cols(); ++i)
        f << s << ',' << i << ',' << format_real(b.sequences[s](0, i)) << ','
          << format_real(b.sequences[s](1, i)) << '\n';
    n_sequences += b.sequences.size();
  }
  write_text(out_path(o, "normalization.json"),
             "{\"mean\": " + format_real(corpus.stats.mean) +
                 ", \"sd\": " + format_real(corpus.stats.sd) + "}\n");
  std::cout << "preprocess: " << corpus.batches.size() << " recordings, " << n_sequences
            << " sequences, mean " << corpus.stats.mean << " sd " << corpus.stats.sd << '\n';
  return kOk;
}

int cmd_manipulate(const Options& o) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset data = dataset_from(o);
  const Condition c = condition_from(o);
  if (c.kind != Manipulation::Noise && c.kind != Manipulation::Decimate)
    throw ArgumentError("manipulate rewrites recordings; --kind must be noise or decimate");
  Dataset out = data;
  for (std::size_t i = 0; i < out.recordings.size(); ++i) {
    const GazeRecording& r = data.recordings[i];
    out.recordings[i] = c.kind == Manipulation::Noise
                            ? inject_noise(r, c.level, cfg.seed)
                            : decimate(r, decimation_factor(r.sampling_rate_hz(), c.level));
    auto& e = out.manifest.recordings[i];
    e.sampling_rate_hz = out.recordings[i].sampling_rate_hz();
    e.path = "recordings/" + e.subject_id + "_" + std::string(to_string(e.session)) + "_" +
             e.task + ".csv";
  }
  write_dataset(out, o.out);
  std::cout << "manipulate: " << to_string(c.kind) << ' ' << format_real(c.level) << " on "
            << out.recordings.size() << " recordings -> "
            << (fs::path(o.out) / "manifest.json").string() << '\n';
  return kOk;
}

int cmd_embed(const Options& o) {
  const ExperimentConfig cfg = base_config(o);
  const Dataset data = dataset_from(o);
  const Condition c = condition_from(o);
  const EmbeddingMatrix m = embed_dataset(cfg, data, c);
  const EmbeddingMatrix enroll = m.select(data.manifest.enrollment_selector.session);
  const EmbeddingMatrix auth = m.select(data.manifest.authentication_selector.session);
  write_embeddings(enroll, out_path(o, "enroll.csv"));
  write_embeddings(auth, out_path(o, "auth.csv"));
  write_embeddings(m, out_path(o, condition_tag(c) + ".csv"));
  std::cout << "embed: " << cfg.embedder << ", " << enroll.size() << " enrollment and "
            << auth.size() << " authentication embeddings of dimension " << m.dimension()
            << '\n';
  return kOk;
}

int cmd_evaluate(const Options& o) {
  const EmbeddingMatrix enroll = read_embeddings(o.enroll);
  const EmbeddingMatrix auth = read_embeddings(o.auth);
  MetricReport rep = evaluate_embeddings(enroll, auth);
  if (o.seed) rep.seed = *o.seed;
  write_reports({rep}, out_path(o, "report.csv"));
  std::cout << "evaluate: " << rep.n_subjects << " subjects, eer " << format_real(rep.eer)
            << ", kcc " << format_real(rep.kcc) << ", intercorrelation "
            << format_real(rep.intercorr_mean_abs) << '\n';
  return kOk;
}

double report_column(const MetricReport& r, const std::string& name) {
  static const std::map<std::string, double MetricReport::*> columns = {
      {"level", &MetricReport::level},
      {"kcc", &MetricReport::kcc},
      {"eer", &MetricReport::eer},
      {"intercorr_mean_abs", &MetricReport::intercorr_mean_abs},
      {"intercorr_sd", &MetricReport::intercorr_sd},
      {"norm_mean", &MetricReport::norm_mean},
      {"norm_sd", &MetricReport::norm_sd},
  };
  if (name == "n_subjects") return double(r.n_subjects);
  const auto it = columns.find(name);
  if (it == columns.end()) throw ArgumentError("unknown report column '" + name + "'");
  return r.*(it->second);
}

int cmd_fit(const Options& o) {
  const FitModel model = parse_fit_model(o.model);
  std::optional<Manipulation> kind;
  if (!o.kind.empty()) kind = parse_manipulation(o.kind);
  std::vector<double> xs, ys;
  for (const auto& r : read_reports(o.report)) {
    if (!r.ok() || (kind && r.manipulation != *kind)) continue;
    const double x = report_column(r, o.x), y = report_column(r, o.y);
    if (std::isnan(x) || std::isnan(y)) continue;
    xs.push_back(x);
    ys.push_back(y);
  }
  const Eigen::Map<const Eigen::VectorXd> xv(xs.data(), Eigen::Index(xs.size()));
  const Eigen::Map<const Eigen::VectorXd> yv(ys.data(), Eigen::Index(ys.size()));
  const FitResult f = fit(model, xv, yv);
  FitRow row{o.x, o.y, std::string(to_string(f.model)), f.a, f.b, f.r2, f.n_points};
  write_fits({row}, out_path(o, "fits.csv"));
  std::cout << "fit: " << o.y << " ~ " << (model == FitModel::Log ? "a*ln(" + o.x + ")+b" : "a*" + o.x + "+b")
            << ", a " << format_real(f.a) << ", b " << format_real(f.b) << ", r2 "
            << format_real(f.r2) << ", n " << f.n_points << '\n';
  return kOk;
}

int cmd_sweep(const Options& o) {
  const ExperimentConfig cfg = base_config(o);
  cfg.check();
  const Dataset data = make_dataset(cfg);
  const SweepResult r = run_sweep(cfg, data, o.jobs);
  write_sweep(r, o.out);
  write_text(out_path(o, "config.json"), config_to_json(cfg));
  std::size_t failed = 0;
  for (const auto& rep : r.reports) failed += rep.ok() ? 0 : 1;
  std::cout << "sweep: " << r.reports.size() << " conditions (" << failed << " with errors), "
            << r.fits.size() << " fits -> " << o.out << '\n';
  return kOk;
}

int cmd_precision(const Options& o) {
  const Dataset data = dataset_from(o);
  const PrecisionTable t = subject_spatial_precision(data, o.noise_sd, o.seed.value_or(7));
  write_precision(t, out_path(o, "precision.csv"));
  std::cout << "precision: " << t.subjects.size() << " subjects, noise sd "
            << format_real(o.noise_sd) << ", dataset median " << format_real(t.dataset_median)
            << " deg\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"gazebench: eye-movement biometric data-quality benchmark"};
  app.require_subcommand(1);
  Options o;

  auto add_out = [&](CLI::App* sc) {
    sc->add_option("--out", o.out, "Output directory; every file is written below it")->required();
  };
  auto add_seed = [&](CLI::App* sc) { sc->add_option("--seed", o.seed, "Master random seed"); };
  auto add_source = [&](CLI::App* sc) {
    sc->add_option("--manifest", o.manifest, "Dataset manifest (JSON)");
    sc->add_option("--config", o.config, "Experiment config (JSON); its dataset is used when no --manifest is given")
        ;
  };
  auto add_condition = [&](CLI::App* sc, const char* what) {
    sc->add_option("--kind", o.kind, std::string("Manipulation ") + what)
        ->check(CLI::IsMember({"decimate", "percentage", "num_sequences", "noise"}));
    sc->add_option("--level", o.level, "Manipulation level (Hz, %, count or deg)");
  };

  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic two-session dataset");
  add_out(gen);
  add_seed(gen);
  gen->add_option("--config", o.config, "Config whose \"synthetic\" section sets the generator")
      ;
  gen->add_option("--subjects", o.subjects, "Number of subjects")->check(CLI::PositiveNumber);

  auto* pre = app.add_subcommand("preprocess", "Write normalized velocity sequences");
  add_source(pre);
  add_out(pre);
  add_seed(pre);
  add_condition(pre, "applied before preprocessing");

  auto* man = app.add_subcommand("manipulate", "Write a noisy or decimated copy of a dataset");
  add_source(man);
  add_out(man);
  add_seed(man);
  add_condition(man, "(noise or decimate)");
  man->get_option("--kind")->required();
  man->get_option("--level")->required();

  auto* emb = app.add_subcommand("embed", "Write enrollment and authentication centroid embeddings");
  add_source(emb);
  add_out(emb);
  add_seed(emb);
  add_condition(emb, "applied before embedding");
  emb->add_option("--embedder", o.embedder, "stat or seeded-conv")
      ->check(CLI::IsMember({"stat", "seeded-conv"}));

  auto* ev = app.add_subcommand("evaluate", "Score externally supplied embeddings");
  ev->add_option("--enroll", o.enroll, "Enrollment embeddings CSV")->required();
  ev->add_option("--auth", o.auth, "Authentication embeddings CSV")->required();
  add_out(ev);
  add_seed(ev);

  auto* ft = app.add_subcommand("fit", "Fit a linear or logarithmic model to report columns");
  ft->add_option("--report", o.report, "Report CSV")->required();
  ft->add_option("--x", o.x, "Predictor column")->capture_default_str();
  ft->add_option("--y", o.y, "Response column")->capture_default_str();
  ft->add_option("--model", o.model, "linear or log")
      ->capture_default_str()
      ->check(CLI::IsMember({"linear", "log"}));
  ft->add_option("--kind", o.kind, "Only rows of this manipulation")
      ->check(CLI::IsMember({"decimate", "percentage", "num_sequences", "noise", "none"}));
  add_out(ft);

  auto* sw = app.add_subcommand("sweep", "Run every manipulation level and fit the trends");
  sw->add_option("--config", o.config, "Experiment config (JSON)")->required();
  sw->add_option("--manifest", o.manifest, "Dataset manifest overriding the config's dataset")
      ;
  add_out(sw);
  add_seed(sw);
  sw->add_option("--jobs", o.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  sw->add_option("--embedder", o.embedder, "stat, seeded-conv or external:<dir>");

  auto* pr = app.add_subcommand("precision", "Spatial precision per subject");
  add_source(pr);
  add_out(pr);
  add_seed(pr);
  pr->add_option("--noise-sd", o.noise_sd, "Gaussian noise added first, in degrees")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_gen_synthetic(o);
    if (*pre) return cmd_preprocess(o);
    if (*man) return cmd_manipulate(o);
    if (*emb) return cmd_embed(o);
    if (*ev) return cmd_evaluate(o);
    if (*ft) return cmd_fit(o);
    if (*sw) return cmd_sweep(o);
    if (*pr) return cmd_precision(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace gazebench
