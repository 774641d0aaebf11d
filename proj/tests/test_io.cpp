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

#include "gazebench/io.hpp"

using namespace gazebench;
namespace fs = std::filesystem;

namespace {

ManifestEntry meta1000() {
  ManifestEntry e;
  e.subject_id = "s1";
  e.session = Session::S1;
  e.task = "TEX";
  e.sampling_rate_hz = 1000.0;
  return e;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("gazebench_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

EmbeddingMatrix sample_matrix(Eigen::Index dim) {
  EmbeddingMatrix m(dim);
  for (const char* s : {"a", "b"})
    for (Session ses : {Session::S1, Session::S2})
      m.insert(s, ses, Eigen::VectorXd::LinSpaced(dim, 0.1, 1.0 + double(ses == Session::S2)));
  return m;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("format_real round-trips exactly") {
    for (double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5, 0.123456789012}) {
      CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(format_real(kMissing) == "nan");
    CHECK(is_missing(parse_real("NaN")));
    CHECK_THROWS_AS(parse_real("abc"), FormatError);
  }

  TEST_CASE("parse two valid rows") {
    std::istringstream in("0.1,0.2\n0.2,0.1\n");
    const auto r = parse_recording(in, meta1000());
    CHECK(r.size() == 2);
    CHECK(r.valid(0));
    CHECK(r.valid(1));
    CHECK(r.horizontal()[1] == doctest::Approx(0.2));
    CHECK(r.sampling_rate_hz() == 1000.0);
  }

  TEST_CASE("NaN and empty cells are missing") {
    std::istringstream in("x_deg,y_deg\nNaN,0.0\n1.0,\n");
    const auto r = parse_recording(in, meta1000());
    CHECK(is_missing(r.horizontal()[0]));
    CHECK_FALSE(r.valid(0));
    CHECK(r.horizontal()[1] == 1.0);
    CHECK(is_missing(r.vertical()[1]));
  }

  TEST_CASE("bad cell reports its row") {
    std::istringstream in("abc,0.0\n");
    try {
      parse_recording(in, meta1000());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.row() == 1);
      CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }
    std::istringstream in2("0,0\n1,2,3\n");
    CHECK_THROWS_AS(parse_recording(in2, meta1000()), ParseError);
  }

  TEST_CASE("empty recording") {
    std::istringstream in("x_deg,y_deg\n");
    CHECK_THROWS_AS(parse_recording(in, meta1000()), EmptyRecordingError);
  }

  TEST_CASE("missing file is an io error") {
    CHECK_THROWS_AS(load_recording("/nonexistent/rec.csv", meta1000()), IoError);
    CHECK_THROWS_AS(read_embeddings(std::string("/nonexistent/e.csv")), IoError);
  }

  TEST_CASE("recording write/read round trip keeps missing samples") {
    const auto dir = scratch("rec");
    Eigen::ArrayXd h(3), v(3);
    h << 1.5, kMissing, -2.25;
    v << 0.0, 1.0, 3.0;
    GazeRecording r("s1", Session::S1, "TEX", 1000.0, h, v);
    write_recording(r, (dir / "r.csv").string());
    const auto back = load_recording((dir / "r.csv").string(), meta1000());
    REQUIRE(back.size() == 3);
    CHECK(back.horizontal()[0] == 1.5);
    CHECK_FALSE(back.valid(1));
    CHECK(back.vertical()[2] == 3.0);
  }

  TEST_CASE("embedding file shape: 2 subjects x 2 sessions at d=128") {
    std::stringstream ss;
    write_embeddings(sample_matrix(128), ss);
    std::string line;
    int rows = 0;
    std::getline(ss, line);
    CHECK(std::count(line.begin(), line.end(), ',') + 1 == 130);
    while (std::getline(ss, line)) {
      CHECK(std::count(line.begin(), line.end(), ',') + 1 == 130);
      ++rows;
    }
    CHECK(rows == 4);
  }

  TEST_CASE("embedding round trip is exact") {
    EmbeddingMatrix m(128);
    Eigen::VectorXd v = Eigen::VectorXd::Constant(128, 0.5);
    v[3] = 0.123456789012;
    m.insert("x", Session::S1, v);
    std::stringstream ss;
    write_embeddings(m, ss);
    const auto back = read_embeddings(ss);
    CHECK(back.at("x", Session::S1)[3] == 0.123456789012);
    CHECK(back == m);
  }

  TEST_CASE("mixed dimensions are a format error") {
    std::stringstream a, b;
    write_embeddings(sample_matrix(128), a);
    write_embeddings(sample_matrix(64), b);
    std::string head128, row64, skip;
    std::getline(b, skip);
    std::getline(b, row64);
    std::stringstream mixed(a.str() + row64 + "\n");
    CHECK_THROWS_AS(read_embeddings(mixed), FormatError);
  }

  TEST_CASE("duplicate embedding key") {
    std::stringstream ss;
    write_embeddings(sample_matrix(4), ss);
    std::string text = ss.str();
    const auto second = text.find('\n') + 1;
    const auto end = text.find('\n', second) + 1;
    std::stringstream dup(text + text.substr(second, end - second));
    CHECK_THROWS_AS(read_embeddings(dup), DuplicateKeyError);
  }

  TEST_CASE("manifest validation") {
    const auto dir = scratch("manifest");
    DatasetManifest m;
    m.dataset_name = "t";
    m.base_dir = dir.string();
    for (const char* s : {"a", "b", "c"})
      for (Session ses : {Session::S1, Session::S2}) {
        ManifestEntry e;
        e.subject_id = s;
        e.session = ses;
        e.task = "TEX";
        e.path = std::string(s) + "_" + std::string(to_string(ses)) + ".csv";
        std::ofstream(dir / e.path) << "0,0\n";
        m.recordings.push_back(e);
      }
    CHECK(validate_manifest(m).empty());

    auto missing_session = m;
    missing_session.recordings.pop_back();
    auto w = validate_manifest(missing_session);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("c") != std::string::npos);

    auto dangling = m;
    dangling.recordings[0].path = "nowhere.csv";
    w = validate_manifest(dangling);
    REQUIRE(w.size() == 1);
    CHECK(w[0].find("nowhere.csv") != std::string::npos);

    write_manifest(m, (dir / "manifest.json").string());
    const auto back = read_manifest((dir / "manifest.json").string());
    CHECK(back.recordings.size() == 6);
    CHECK(back.recordings[3].subject_id == "b");
    CHECK(validate_manifest(back).empty());
  }

  TEST_CASE("manifest rejects duplicate keys") {
    DatasetManifest m;
    ManifestEntry e;
    e.subject_id = "a";
    e.path = "x.csv";
    m.recordings = {e, e};
    CHECK_THROWS_AS(m.check(), FormatError);
  }

  TEST_CASE("report round trip with an error message containing a comma") {
    const auto dir = scratch("reports");
    MetricReport ok;
    ok.manipulation = Manipulation::Noise;
    ok.level = 0.5;
    ok.kcc = 0.75;
    ok.eer = 0.125;
    ok.n_subjects = 60;
    ok.seed = 7;
    MetricReport bad;
    bad.manipulation = Manipulation::Decimate;
    bad.level = 10;
    bad.error = "too short, \"really\"";
    write_reports({ok, bad}, (dir / "r.csv").string());
    const auto back = read_reports((dir / "r.csv").string());
    REQUIRE(back.size() == 2);
    CHECK(back[0].kcc == 0.75);
    CHECK(back[0].manipulation == Manipulation::Noise);
    CHECK(back[0].seed == 7);
    CHECK(back[1].error == bad.error);
    CHECK(is_missing(back[1].eer));
  }
}
