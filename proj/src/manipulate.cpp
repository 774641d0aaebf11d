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

#include "gazebench/manipulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "gazebench/filter.hpp"

namespace gazebench {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Linear interpolation across missing runs; ends hold the nearest value.
Eigen::ArrayXd bridge_missing(const Eigen::ArrayXd& x, const std::vector<bool>& bad) {
  Eigen::ArrayXd out = x;
  const Eigen::Index n = x.size();
  Eigen::Index prev = -1;
  for (Eigen::Index i = 0; i <= n; ++i) {
    if (i < n && bad[std::size_t(i)]) continue;
    const Eigen::Index gap_begin = prev + 1;
    if (gap_begin < i) {
      for (Eigen::Index k = gap_begin; k < i; ++k) {
        if (prev < 0)
          out[k] = x[i];
        else if (i == n)
          out[k] = x[prev];
        else
          out[k] = x[prev] + (x[i] - x[prev]) * double(k - prev) / double(i - prev);
      }
    }
    prev = i;
  }
  return out;
}

void search_stages(int q, int max_factor, std::vector<int>& current, std::size_t max_stages,
                   std::vector<int>& best) {
  if (q == 1) {
    if (best.empty() || current.size() < best.size() ||
        (current.size() == best.size() &&
         *std::max_element(current.begin(), current.end()) <
             *std::max_element(best.begin(), best.end())))
      best = current;
    return;
  }
  if (current.size() >= max_stages) return;
  for (int f = std::min(max_factor, q); f >= 2; --f) {
    if (q % f != 0) continue;
    current.push_back(f);
    search_stages(q / f, f, current, max_stages, best);
    current.pop_back();
  }
}

GazeRecording decimate_stage(const GazeRecording& r, int q) {
  const Eigen::Index n = r.size();
  std::vector<bool> bad(static_cast<std::size_t>(n));
  bool any_valid = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    bad[std::size_t(i)] = !r.valid(i);
    any_valid = any_valid || !bad[std::size_t(i)];
  }
  const Eigen::Index m = (n + q - 1) / q;
  Eigen::ArrayXd h(m), v(m);
  if (!any_valid) {
    h.setConstant(kMissing);
    v.setConstant(kMissing);
    return r.with_signal(r.sampling_rate_hz() / q, h, v);
  }

  const SosMatrix sos = cheby1_lowpass(kAntiAliasOrder, kAntiAliasRippleDb, kAntiAliasCutoff / q);
  const Eigen::ArrayXd fh = sos_filtfilt(sos, bridge_missing(r.horizontal(), bad));
  const Eigen::ArrayXd fv = sos_filtfilt(sos, bridge_missing(r.vertical(), bad));

  // prefix[i] = number of missing inputs before i.
  std::vector<Eigen::Index> prefix(std::size_t(n) + 1, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    prefix[std::size_t(i) + 1] = prefix[std::size_t(i)] + (bad[std::size_t(i)] ? 1 : 0);
  const Eigen::Index radius = effective_support(sos);

  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::Index i = j * q;
    const Eigen::Index lo = std::max<Eigen::Index>(0, i - radius);
    const Eigen::Index hi = std::min<Eigen::Index>(n, i + radius + 1);
    if (prefix[std::size_t(hi)] - prefix[std::size_t(lo)] > 0) {
      h[j] = v[j] = kMissing;
    } else {
      h[j] = fh[i];
      v[j] = fv[i];
    }
  }
  return r.with_signal(r.sampling_rate_hz() / q, std::move(h), std::move(v));
}

double percentile_linear(const std::vector<double>& sorted, double pct) {
  const double pos = pct / 100.0 * double(sorted.size() - 1);
  const auto lo = std::size_t(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - double(lo)) * (sorted[hi] - sorted[lo]);
}

double median_sorted(const std::vector<double>& sorted, std::size_t count) {
  return count % 2 ? sorted[count / 2] : 0.5 * (sorted[count / 2 - 1] + sorted[count / 2]);
}

}  // namespace

int decimation_factor(double source_hz, double target_hz) {
  if (!(target_hz > 0.0) || target_hz > source_hz * 1.01)
    throw ArgumentError("target rate must be positive and not above the source rate");
  const auto q = int(std::lround(source_hz / target_hz));
  if (q < 1 || std::abs(source_hz / q - target_hz) > 0.01 * target_hz)
    throw ArgumentError("no integer factor takes " + std::to_string(source_hz) + " Hz to " +
                        std::to_string(target_hz) + " Hz");
  return q;
}

std::vector<int> decimation_stages(int q) {
  if (q < 1) throw ArgumentError("decimation factor must be >= 1");
  if (q <= kMaxStageFactor) return {q};
  std::vector<int> current, best;
  for (std::size_t stages = 2; best.empty() && stages <= 32; ++stages)
    search_stages(q, kMaxStageFactor, current, stages, best);
  if (best.empty())
    throw ArgumentError("decimation factor " + std::to_string(q) +
                        " has a prime factor above " + std::to_string(kMaxStageFactor));
  return best;
}

GazeRecording decimate(const GazeRecording& r, int q) {
  if (q < 1) throw ArgumentError("decimation factor must be >= 1");
  if (q == 1) return r;
  if (r.size() < 8 * Eigen::Index(q))
    throw TooShortError("decimation by " + std::to_string(q) + " needs at least " +
                        std::to_string(8 * q) + " samples");
  GazeRecording out = r;
  for (int f : decimation_stages(q)) out = decimate_stage(out, f);
  return out;
}

Sequence percentage_truncate(const Sequence& seq, double percent) {
  if (!(percent > 0.0 && percent <= 100.0))
    throw ArgumentError("percentage must lie in (0, 100]");
  const Eigen::Index len = seq.cols();
  const Eigen::Index width = std::min<Eigen::Index>(len, std::lround(percent * double(len) / 100.0));
  const Eigen::Index left = (len - width) / 2;
  Sequence out = Sequence::Zero(2, len);
  out.middleCols(left, width) = seq.leftCols(width);
  return out;
}

SequenceBatch take_first_sequences(const SequenceBatch& batch, int n) {
  if (n < 1) throw ArgumentError("sequence count must be >= 1");
  if (std::size_t(n) > batch.sequences.size())
    throw ArgumentError("subject " + batch.subject_id + " has " +
                        std::to_string(batch.sequences.size()) + " sequences, " +
                        std::to_string(n) + " requested (short by " +
                        std::to_string(std::size_t(n) - batch.sequences.size()) + ")");
  SequenceBatch out = batch;
  out.sequences.resize(std::size_t(n));
  return out;
}

std::uint64_t stream_key(std::uint64_t seed, const std::string& subject_id, Session session,
                         std::uint64_t salt) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ fnv1a(subject_id));
  k = splitmix64(k ^ (session == Session::S1 ? 1ULL : 2ULL));
  return splitmix64(k ^ salt);
}

GazeRecording inject_noise(const GazeRecording& r, double sigma_deg, std::uint64_t seed) {
  if (!(sigma_deg >= 0.0)) throw ArgumentError("noise SD must be non-negative");
  if (sigma_deg == 0.0) return r;
  std::mt19937_64 gen(stream_key(seed, r.subject_id(), r.session(), 0x6e6f697365ULL));
  std::normal_distribution<double> normal(0.0, sigma_deg);
  Eigen::ArrayXd h = r.horizontal();
  Eigen::ArrayXd v = r.vertical();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    // Draw for every index so the stream position never depends on validity.
    const double dh = normal(gen);
    const double dv = normal(gen);
    if (!is_missing(h[i])) h[i] += dh;
    if (!is_missing(v[i])) v[i] += dv;
  }
  return r.with_signal(r.sampling_rate_hz(), std::move(h), std::move(v));
}

double spatial_precision(const GazeRecording& r, PrecisionVariant variant) {
  const auto seg = Eigen::Index(std::lround(kPrecisionSegmentS * r.sampling_rate_hz()));
  if (seg < 2) throw ArgumentError("sampling rate too low for 80 ms precision segments");
  std::vector<double> rms;
  const auto& x = r.horizontal();
  for (Eigen::Index start = 0; start + seg <= r.size(); start += seg) {
    bool clean = true;
    for (Eigen::Index i = start; i < start + seg && clean; ++i) clean = r.valid(i);
    if (!clean) continue;
    auto s = x.segment(start, seg);
    if (variant == PrecisionVariant::SuccessiveDifferences) {
      const Eigen::ArrayXd d = s.tail(seg - 1) - s.head(seg - 1);
      rms.push_back(std::sqrt(d.square().mean()));
    } else {
      rms.push_back(std::sqrt((s - s.mean()).square().mean()));
    }
  }
  if (rms.size() < std::size_t(kPrecisionMinSegments))
    throw InsufficientDataError("only " + std::to_string(rms.size()) +
                                " clean 80 ms segments; need " +
                                std::to_string(kPrecisionMinSegments));
  std::sort(rms.begin(), rms.end());
  const double cut = percentile_linear(rms, kPrecisionPercentile);
  const auto count = std::size_t(std::upper_bound(rms.begin(), rms.end(), cut) - rms.begin());
  return median_sorted(rms, std::max<std::size_t>(count, 1));
}

}  // namespace gazebench
