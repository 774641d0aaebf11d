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
#include "gazebench/synthetic.hpp"

using namespace gazebench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

SyntheticSpec small(int n = 3) {
  SyntheticSpec s;
  s.n_subjects = n;
  s.duration_s = 12.0;
  return s;
}

}  // namespace

TEST_SUITE("synthetic") {
  TEST_CASE("dataset layout") {
    const auto d = generate_synthetic(small());
    CHECK(d.recordings.size() == 6);
    CHECK(d.manifest.recordings.size() == 6);
    CHECK(d.manifest.recordings[0].subject_id == "s001");
    CHECK(d.recordings[0].size() == 12000);
    CHECK(d.recordings[1].session() == Session::S2);
    CHECK_NOTHROW(d.manifest.check());
  }

  TEST_CASE("positions stay within the tracker range") {
    const auto d = generate_synthetic(small(4));
    for (const auto& r : d.recordings) {
      for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!r.valid(i)) continue;
        CHECK(r.horizontal()[i] >= -23.3);
        CHECK(r.horizontal()[i] <= 23.3);
        CHECK(r.vertical()[i] >= -18.5);
        CHECK(r.vertical()[i] <= 11.7);
      }
    }
  }

  TEST_CASE("blinks leave missing runs but most data is valid") {
    const auto r = generate_synthetic(small(3)).recordings[0];
    Eigen::Index valid = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i) valid += r.valid(i);
    CHECK(valid > r.size() * 8 / 10);
  }

  TEST_CASE("written datasets are byte-identical across runs") {
    const auto a = fs::temp_directory_path() / "gazebench_syn_a";
    const auto b = fs::temp_directory_path() / "gazebench_syn_b";
    fs::remove_all(a);
    fs::remove_all(b);
    write_dataset(generate_synthetic(small()), a.string());
    write_dataset(generate_synthetic(small()), b.string());
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    for (const auto& e : fs::directory_iterator(a / "recordings"))
      CHECK(slurp(e.path()) == slurp(b / "recordings" / e.path().filename()));
    const auto loaded = load_dataset(read_manifest((a / "manifest.json").string()));
    CHECK(loaded.recordings.size() == 6);
  }

  TEST_CASE("zero perturbation shares parameters between sessions") {
    auto s = small();
    s.session_perturbation = 0.0;
    const auto p1 = draw_subject(s, "s002", Session::S1);
    const auto p2 = draw_subject(s, "s002", Session::S2);
    CHECK(p1.saccade_rate_hz == p2.saccade_rate_hz);
    CHECK(p1.drift_sd == p2.drift_sd);
    CHECK(p1.profile_skew == p2.profile_skew);
    const auto r1 = simulate_recording(s, "s002", Session::S1);
    const auto r2 = simulate_recording(s, "s002", Session::S2);
    const bool same = r1.size() == r2.size() && (r1.horizontal() == r2.horizontal()).all();
    CHECK_FALSE(same);
  }

  TEST_CASE("subjects differ") {
    const auto s = small();
    CHECK(draw_subject(s, "s001", Session::S1).saccade_rate_hz !=
          draw_subject(s, "s002", Session::S1).saccade_rate_hz);
    const auto p = draw_subject(s, "s001", Session::S1);
    CHECK(p.saccade_rate_hz >= s.saccade_rate_hz.lo);
    CHECK(p.saccade_rate_hz <= s.saccade_rate_hz.hi);
  }

  TEST_CASE("generator settings validation") {
    auto s = small();
    s.n_subjects = 0;
    CHECK_THROWS_AS(s.check(), ArgumentError);
    s = small();
    s.drift_sd = {1.0, 0.5};
    CHECK_THROWS_AS(s.check(), ArgumentError);
  }
}
