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

#include <cmath>

#include "gazebench/filter.hpp"
#include "gazebench/manipulate.hpp"
#include "oracles.hpp"

using namespace gazebench;

namespace {

constexpr double kPi = 3.14159265358979323846;

GazeRecording tone(double fs, double seconds, double freq, double amp = 1.0) {
  const auto n = Eigen::Index(std::lround(fs * seconds));
  const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(n, 0, double(n - 1)) / fs;
  return GazeRecording("s", Session::S1, "TEX", fs, amp * (2 * kPi * freq * t).sin(),
                       Eigen::ArrayXd::Zero(n));
}

GazeRecording flat(Eigen::Index n, double fs = 1000.0, const char* subject = "s") {
  return GazeRecording(subject, Session::S1, "TEX", fs, Eigen::ArrayXd::Zero(n),
                       Eigen::ArrayXd::Zero(n));
}

}  // namespace

TEST_SUITE("manipulate") {
  TEST_CASE("chebyshev response against a frozen reference design") {
    // |H| of the order-8, 0.05 dB design at cutoff 0.08, divided by its DC
    // gain (0.994260074), at 0, 0.04, 0.08, 0.1, 0.2 of Nyquist.
    const double ref[] = {9.94260074e-01, 9.98463562e-01, 9.94260074e-01, 6.96021162e-02,
                          5.22651685e-05};
    const double freqs[] = {0.0, 0.04, 0.08, 0.1, 0.2};
    const auto sos = cheby1_lowpass(8, 0.05, 0.08);
    CHECK(sos.rows() == 4);
    for (int i = 0; i < 5; ++i) {
      CAPTURE(freqs[i]);
      CHECK(sos_gain(sos, freqs[i]) == doctest::Approx(ref[i] / ref[0]).epsilon(1e-6));
    }
  }

  TEST_CASE("filtfilt passes constants and keeps a slow sine in phase") {
    const auto sos = cheby1_lowpass(8, 0.05, 0.2);
    const Eigen::ArrayXd c = Eigen::ArrayXd::Constant(500, 3.25);
    CHECK((sos_filtfilt(sos, c) - 3.25).abs().maxCoeff() < 1e-9);
    const Eigen::ArrayXd t = Eigen::ArrayXd::LinSpaced(2000, 0, 1999);
    const Eigen::ArrayXd x = (2 * kPi * 0.01 * t).sin();
    const Eigen::ArrayXd y = sos_filtfilt(sos, x);
    CHECK((y - x).segment(200, 1600).abs().maxCoeff() < 0.01);
  }

  TEST_CASE("filter state and support") {
    const auto sos = cheby1_lowpass(8, 0.05, 0.1);
    const auto zi = sos_filter_zi(sos);
    CHECK(zi.rows() == sos.rows());
    const Eigen::ArrayXd step = Eigen::ArrayXd::Ones(300);
    const Eigen::ArrayXd y = sos_filter(sos, step);
    CHECK(y[299] == doctest::Approx(1.0).epsilon(1e-3));
    const auto n = effective_support(sos);
    CHECK(n > 10);
    CHECK(n < 2000);
  }

  TEST_CASE("decimation factors") {
    CHECK(decimation_factor(1000, 1000) == 1);
    CHECK(decimation_factor(1000, 500) == 2);
    CHECK(decimation_factor(1000, 333) == 3);
    CHECK(decimation_factor(1000, 25) == 40);
    CHECK(decimation_factor(1000, 10) == 100);
    CHECK_THROWS_AS(decimation_factor(1000, 300), ArgumentError);
    CHECK_THROWS_AS(decimation_factor(1000, 2000), ArgumentError);
  }

  TEST_CASE("stage factorization") {
    CHECK(decimation_stages(2) == std::vector<int>{2});
    CHECK(decimation_stages(13) == std::vector<int>{13});
    CHECK(decimation_stages(40) == std::vector<int>{8, 5});
    CHECK(decimation_stages(100) == std::vector<int>{10, 10});
    CHECK(decimation_stages(1000) == std::vector<int>{10, 10, 10});
    CHECK_THROWS_AS(decimation_stages(17), ArgumentError);
  }

  TEST_CASE("decimating a constant keeps it") {
    GazeRecording r("s", Session::S2, "TEX", 1000.0, Eigen::ArrayXd::Constant(5000, 4.0),
                    Eigen::ArrayXd::Constant(5000, -1.0));
    const auto d = decimate(r, 10);
    CHECK(d.sampling_rate_hz() == 100.0);
    CHECK(d.size() == 500);
    CHECK((d.horizontal() - 4.0).abs().maxCoeff() < 1e-9);
    CHECK((d.vertical() + 1.0).abs().maxCoeff() < 1e-9);
    CHECK(d.session() == Session::S2);
  }

  TEST_CASE("identity and too short") {
    const auto r = flat(100);
    CHECK(decimate(r, 1).horizontal().isApprox(r.horizontal()));
    CHECK_THROWS_AS(decimate(flat(79), 10), TooShortError);
  }

  TEST_CASE("pass-band tone survives decimation by 40") {
    const auto d = decimate(tone(1000.0, 40.0, 2.0), 40);
    CHECK(d.sampling_rate_hz() == 25.0);
    CHECK(oracle::tone_amplitude(d.horizontal(), 25.0, 2.0, 50) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("stop-band tone is attenuated") {
    // 8 Hz folds to 2 Hz at 10 Hz output.
    const auto d = decimate(tone(1000.0, 100.0, 8.0), 100);
    CHECK(oracle::tone_amplitude(d.horizontal(), 10.0, 2.0, 50) < 0.1);
  }

  TEST_CASE("missing samples poison the filter support only") {
    Eigen::ArrayXd h = Eigen::ArrayXd::Constant(20000, 1.0);
    h.segment(10000, 5) = kMissing;
    GazeRecording r("s", Session::S1, "TEX", 1000.0, h, Eigen::ArrayXd::Zero(20000));
    const auto d = decimate(r, 10);
    CHECK_FALSE(d.valid(1000));
    CHECK(d.valid(10));
    CHECK(d.valid(1990));
    int invalid = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i) invalid += !d.valid(i);
    CHECK(invalid < 200);
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d.valid(i)) CHECK(d.horizontal()[i] == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("percentage truncation geometry") {
    Sequence s = Sequence::Constant(2, 5000, 2.0);
    CHECK(percentage_truncate(s, 100).isApprox(s));
    auto half = percentage_truncate(s, 50);
    CHECK(half(0, 1249) == 0.0);
    CHECK(half(0, 1250) == 2.0);
    CHECK(half(1, 3749) == 2.0);
    CHECK(half(1, 3750) == 0.0);
    auto one = percentage_truncate(s, 1);
    CHECK((one.row(0) != 0).count() == 50);
    CHECK(one(0, 2474) == 0.0);
    CHECK(one(0, 2475) == 2.0);
    Sequence ramp(2, 5000);
    ramp.row(0) = Eigen::ArrayXd::LinSpaced(5000, 0, 4999).transpose();
    ramp.row(1) = ramp.row(0);
    CHECK(percentage_truncate(ramp, 50)(0, 1250) == 0.0);
    CHECK(percentage_truncate(ramp, 50)(0, 1251) == 1.0);
    CHECK_THROWS_AS(percentage_truncate(s, 0), ArgumentError);
    CHECK_THROWS_AS(percentage_truncate(s, 101), ArgumentError);
  }

  TEST_CASE("take first sequences") {
    SequenceBatch b;
    b.subject_id = "s";
    for (int i = 0; i < 12; ++i) b.sequences.push_back(Sequence::Constant(2, 4, double(i)));
    CHECK(take_first_sequences(b, 12).sequences.size() == 12);
    const auto one = take_first_sequences(b, 1);
    REQUIRE(one.sequences.size() == 1);
    CHECK(one.sequences[0](0, 0) == 0.0);
    b.sequences.resize(9);
    CHECK_THROWS_AS(take_first_sequences(b, 10), ArgumentError);
    CHECK_THROWS_AS(take_first_sequences(b, 0), ArgumentError);
  }

  TEST_CASE("noise: zero sigma is an exact copy") {
    auto r = tone(1000.0, 1.0, 3.0);
    const auto n = inject_noise(r, 0.0, 5);
    CHECK((n.horizontal() == r.horizontal()).all());
    CHECK((n.vertical() == r.vertical()).all());
  }

  TEST_CASE("noise variance and missing passthrough") {
    Eigen::ArrayXd h = Eigen::ArrayXd::Zero(60000);
    h[17] = kMissing;
    GazeRecording r("s", Session::S1, "TEX", 1000.0, h, Eigen::ArrayXd::Zero(60000));
    const auto n = inject_noise(r, 1.0, 11);
    CHECK(is_missing(n.horizontal()[17]));
    for (const Eigen::ArrayXd* ch : {&n.horizontal(), &n.vertical()}) {
      double s = 0, ss = 0, count = 0;
      for (Eigen::Index i = 0; i < ch->size(); ++i)
        if (!is_missing((*ch)[i])) s += (*ch)[i], ss += (*ch)[i] * (*ch)[i], count += 1;
      const double var = ss / count - (s / count) * (s / count);
      CHECK(var > 0.97);
      CHECK(var < 1.03);
    }
  }

  TEST_CASE("noise streams depend on seed, subject and session") {
    const auto a = inject_noise(flat(100, 1000.0, "a"), 1.0, 1);
    CHECK((a.horizontal() == inject_noise(flat(100, 1000.0, "a"), 1.0, 1).horizontal()).all());
    CHECK_FALSE((a.horizontal() == inject_noise(flat(100, 1000.0, "a"), 1.0, 2).horizontal()).all());
    CHECK_FALSE((a.horizontal() == inject_noise(flat(100, 1000.0, "b"), 1.0, 1).horizontal()).all());
    CHECK(stream_key(1, "a", Session::S1) != stream_key(1, "a", Session::S2));
    // The same index receives the same draw regardless of a later sample's validity.
    Eigen::ArrayXd h = Eigen::ArrayXd::Zero(100);
    h[50] = kMissing;
    GazeRecording holes("a", Session::S1, "TEX", 1000.0, h, Eigen::ArrayXd::Zero(100));
    const auto b = inject_noise(holes, 1.0, 1);
    CHECK(b.horizontal()[60] == a.horizontal()[60]);
    CHECK_THROWS_AS(inject_noise(flat(10), -1.0, 1), ArgumentError);
  }

  TEST_CASE("spatial precision") {
    CHECK(spatial_precision(flat(60000)) == 0.0);
    auto base = flat(60000);
    double p1 = 0, p2 = 0;
    for (int seed = 0; seed < 5; ++seed) {
      p1 += spatial_precision(inject_noise(base, 1.0, std::uint64_t(seed))) / 5;
      p2 += spatial_precision(inject_noise(base, 2.0, std::uint64_t(seed))) / 5;
    }
    CHECK(p1 >= 1.05);
    CHECK(p1 <= 1.25);
    CHECK(p2 >= 2.15);
    CHECK(p2 <= 2.45);
    CHECK_THROWS_AS(spatial_precision(flat(1000)), InsufficientDataError);
  }
}
