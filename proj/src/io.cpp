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

#include "gazebench/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gazebench {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Splits one CSV line; double-quoted fields may hold commas and "" escapes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

bool getline_stripped(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Missing value if the cell is empty or NaN; throws ParseError otherwise.
double parse_gaze_cell(std::string_view cell, std::size_t row) {
  cell = trim(cell);
  if (cell.empty() || iequals(cell, "nan")) return kMissing;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
    throw ParseError(row, "not a number: '" + std::string(cell) + "'");
  return v;
}

Session session_of(const nlohmann::json& j) {
  return parse_session(j.get<std::string>());
}

nlohmann::json selector_json(const RecordingSelector& s) {
  return {{"session", std::string(to_string(s.session))},
          {"task", s.task},
          {"duration_s", s.duration_s}};
}

RecordingSelector selector_from(const nlohmann::json& j) {
  return {session_of(j.at("session")), j.at("task").get<std::string>(),
          j.at("duration_s").get<double>()};
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_real(std::string_view text) {
  text = trim(text);
  if (iequals(text, "nan")) return std::numeric_limits<double>::quiet_NaN();
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return v;
}

GazeRecording parse_recording(std::istream& in, const ManifestEntry& meta) {
  std::vector<double> xs, ys;
  std::string line;
  std::size_t row = 0;
  bool first = true;
  while (getline_stripped(in, line)) {
    if (first) {
      first = false;
      auto cells = split_csv(line);
      if (cells.size() == 2 && trim(cells[0]) == "x_deg" && trim(cells[1]) == "y_deg") continue;
    }
    ++row;
    if (trim(line).empty() && in.peek() == std::char_traits<char>::eof()) break;
    auto cells = split_csv(line);
    if (cells.size() != 2)
      throw ParseError(row, "expected 2 columns, found " + std::to_string(cells.size()));
    xs.push_back(parse_gaze_cell(cells[0], row));
    ys.push_back(parse_gaze_cell(cells[1], row));
  }
  if (xs.empty()) throw EmptyRecordingError("recording has no samples");
  return GazeRecording(meta.subject_id, meta.session, meta.task, meta.sampling_rate_hz,
                       Eigen::Map<Eigen::ArrayXd>(xs.data(), Eigen::Index(xs.size())),
                       Eigen::Map<Eigen::ArrayXd>(ys.data(), Eigen::Index(ys.size())));
}

GazeRecording load_recording(const std::string& path, const ManifestEntry& meta) {
  auto in = open_in(path);
  try {
    return parse_recording(in, meta);
  } catch (const EmptyRecordingError&) {
    throw EmptyRecordingError("recording '" + path + "' has no samples");
  }
}

void write_recording(const GazeRecording& r, const std::string& path) {
  auto out = open_out(path);
  out << "x_deg,y_deg\n";
  char buf[64];
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    for (int c = 0; c < 2; ++c) {
      double v = c == 0 ? r.horizontal()[i] : r.vertical()[i];
      if (is_missing(v)) {
        out << "NaN";
      } else {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
        out.write(buf, ptr - buf);
      }
      out << (c == 0 ? ',' : '\n');
    }
  }
  if (!out) throw IoError("failed writing '" + path + "'");
}

void write_embeddings(const EmbeddingMatrix& m, std::ostream& out) {
  if (m.empty()) throw ArgumentError("refusing to write an empty embedding matrix");
  out << "subject_id,session";
  for (Eigen::Index d = 0; d < m.dimension(); ++d) out << ",e" << d;
  out << '\n';
  for (const auto& [key, row] : m.rows()) {
    out << quote_csv(key.first) << ',' << to_string(key.second);
    for (Eigen::Index d = 0; d < row.size(); ++d) out << ',' << format_real(row[d]);
    out << '\n';
  }
}

void write_embeddings(const EmbeddingMatrix& m, const std::string& path) {
  auto out = open_out(path);
  write_embeddings(m, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

EmbeddingMatrix read_embeddings(std::istream& in) {
  std::string line;
  if (!getline_stripped(in, line)) throw FormatError("embedding file is empty");
  auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "subject_id" || header[1] != "session")
    throw FormatError("embedding header must start with subject_id,session,e0");
  const auto dim = Eigen::Index(header.size() - 2);
  for (Eigen::Index d = 0; d < dim; ++d)
    if (header[std::size_t(d) + 2] != "e" + std::to_string(d))
      throw FormatError("unexpected embedding column '" + header[std::size_t(d) + 2] + "'");

  EmbeddingMatrix m(dim);
  std::size_t row = 0;
  while (getline_stripped(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (Eigen::Index(cells.size()) != dim + 2)
      throw FormatError("row " + std::to_string(row) + " has " +
                        std::to_string(cells.size() - 2) + " embedding values, expected " +
                        std::to_string(dim));
    Eigen::VectorXd v(dim);
    for (Eigen::Index d = 0; d < dim; ++d) v[d] = parse_real(cells[std::size_t(d) + 2]);
    m.insert(cells[0], parse_session(trim(cells[1])), std::move(v));
  }
  if (m.empty()) throw FormatError("embedding file has no rows");
  return m;
}

EmbeddingMatrix read_embeddings(const std::string& path) {
  auto in = open_in(path);
  return read_embeddings(in);
}

DatasetManifest read_manifest(const std::string& path) {
  auto in = open_in(path);
  DatasetManifest m;
  try {
    auto j = nlohmann::json::parse(in);
    m.dataset_name = j.at("dataset_name").get<std::string>();
    for (const auto& r : j.at("recordings")) {
      m.recordings.push_back({r.at("path").get<std::string>(),
                              r.at("subject_id").get<std::string>(), session_of(r.at("session")),
                              r.at("task").get<std::string>(),
                              r.at("sampling_rate_hz").get<double>()});
    }
    m.enrollment_selector = selector_from(j.at("enrollment_selector"));
    m.authentication_selector = selector_from(j.at("authentication_selector"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest '" + path + "': " + e.what());
  }
  m.base_dir = std::filesystem::path(path).parent_path().string();
  m.check();
  return m;
}

void write_manifest(const DatasetManifest& m, const std::string& path) {
  nlohmann::ordered_json j;
  j["dataset_name"] = m.dataset_name;
  j["recordings"] = nlohmann::ordered_json::array();
  for (const auto& e : m.recordings) {
    j["recordings"].push_back({{"path", e.path},
                               {"subject_id", e.subject_id},
                               {"session", std::string(to_string(e.session))},
                               {"task", e.task},
                               {"sampling_rate_hz", e.sampling_rate_hz}});
  }
  j["enrollment_selector"] = selector_json(m.enrollment_selector);
  j["authentication_selector"] = selector_json(m.authentication_selector);
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<std::string> validate_manifest(const DatasetManifest& m) {
  std::vector<std::string> warnings;
  std::set<std::string> subjects, enrolled, authenticated;
  for (const auto& e : m.recordings) {
    if (!std::filesystem::exists(m.resolve(e)))
      warnings.push_back("missing file: " + m.resolve(e));
    subjects.insert(e.subject_id);
    if (m.enrollment_selector.matches(e)) enrolled.insert(e.subject_id);
    if (m.authentication_selector.matches(e)) authenticated.insert(e.subject_id);
  }
  for (const auto& s : subjects) {
    if (!enrolled.count(s)) warnings.push_back("subject " + s + " has no enrollment recording");
    if (!authenticated.count(s))
      warnings.push_back("subject " + s + " has no authentication recording");
  }
  return warnings;
}

void write_reports(const std::vector<MetricReport>& reports, std::ostream& out) {
  out << "manipulation,level,kcc,eer,intercorr_mean_abs,intercorr_sd,n_subjects,seed,"
         "norm_mean,norm_sd,error\n";
  for (const auto& r : reports) {
    out << to_string(r.manipulation) << ',' << format_real(r.level) << ','
        << format_real(r.kcc) << ',' << format_real(r.eer) << ','
        << format_real(r.intercorr_mean_abs) << ',' << format_real(r.intercorr_sd) << ','
        << r.n_subjects << ',' << r.seed << ',' << format_real(r.norm_mean) << ','
        << format_real(r.norm_sd) << ',' << quote_csv(r.error) << '\n';
  }
}

void write_reports(const std::vector<MetricReport>& reports, const std::string& path) {
  auto out = open_out(path);
  write_reports(reports, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<MetricReport> read_reports(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!getline_stripped(in, line)) throw FormatError("report '" + path + "' is empty");
  auto header = split_csv(line);
  static const std::vector<std::string> expected = {
      "manipulation", "level",   "kcc",       "eer",     "intercorr_mean_abs", "intercorr_sd",
      "n_subjects",   "seed",    "norm_mean", "norm_sd", "error"};
  if (header != expected) throw FormatError("report '" + path + "' has an unexpected header");
  std::vector<MetricReport> out;
  std::size_t row = 0;
  while (getline_stripped(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto c = split_csv(line);
    if (c.size() != expected.size())
      throw FormatError("report row " + std::to_string(row) + " has " +
                        std::to_string(c.size()) + " columns");
    MetricReport r;
    r.manipulation = parse_manipulation(c[0]);
    r.level = parse_real(c[1]);
    r.kcc = parse_real(c[2]);
    r.eer = parse_real(c[3]);
    r.intercorr_mean_abs = parse_real(c[4]);
    r.intercorr_sd = parse_real(c[5]);
    r.n_subjects = std::stoi(c[6]);
    r.seed = std::stoull(c[7]);
    r.norm_mean = parse_real(c[8]);
    r.norm_sd = parse_real(c[9]);
    r.error = c[10];
    out.push_back(std::move(r));
  }
  return out;
}

void write_fits(const std::vector<FitRow>& fits, std::ostream& out) {
  out << "x_name,y_name,model,a,b,r2,n_points\n";
  for (const auto& f : fits) {
    out << f.x_name << ',' << f.y_name << ',' << f.model << ',' << format_real(f.a) << ','
        << format_real(f.b) << ',' << format_real(f.r2) << ',' << f.n_points << '\n';
  }
}

void write_fits(const std::vector<FitRow>& fits, const std::string& path) {
  auto out = open_out(path);
  write_fits(fits, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace gazebench
