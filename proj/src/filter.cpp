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

#include "gazebench/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gazebench/errors.hpp"

namespace gazebench {

SosMatrix cheby1_lowpass(int order, double ripple_db, double cutoff) {
  if (order < 1) throw ArgumentError("filter order must be positive");
  if (!(ripple_db > 0.0)) throw ArgumentError("ripple must be positive");
  if (!(cutoff > 0.0 && cutoff < 1.0)) throw ArgumentError("cutoff must lie in (0, 1)");
  using cplx = std::complex<double>;
  const double pi = std::numbers::pi;
  const double eps = std::sqrt(std::pow(10.0, 0.1 * ripple_db) - 1.0);
  const double mu = std::asinh(1.0 / eps) / order;
  // Pre-warped analog cutoff for a bilinear transform at fs = 2.
  const double warped = 4.0 * std::tan(pi * cutoff / 2.0);

  std::vector<cplx> upper;  // one pole of each conjugate pair
  std::vector<double> real_poles;
  for (int m = -order + 1; m < order; m += 2) {
    const double theta = pi * m / (2.0 * order);
    const cplx analog = -std::sinh(cplx(mu, theta)) * warped;
    const cplx digital = (4.0 + analog) / (4.0 - analog);
    if (std::abs(digital.imag()) < 1e-14)
      real_poles.push_back(digital.real());
    else if (digital.imag() > 0.0)
      upper.push_back(digital);
  }
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });

  SosMatrix sos(Eigen::Index(upper.size() + real_poles.size()), 6);
  Eigen::Index row = 0;
  for (double p : real_poles) {
    const double a1 = -p;
    const double g = (1.0 + a1) / 2.0;
    sos.row(row++) << g, g, 0.0, 1.0, a1, 0.0;
  }
  for (const cplx& p : upper) {
    const double a1 = -2.0 * p.real();
    const double a2 = std::norm(p);
    const double g = (1.0 + a1 + a2) / 4.0;
    sos.row(row++) << g, 2.0 * g, g, 1.0, a1, a2;
  }
  return sos;
}

namespace {

Eigen::ArrayXd run_sos(const SosMatrix& sos, const Eigen::ArrayXd& x,
                       const Eigen::Matrix<double, Eigen::Dynamic, 2>& zi0) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> z = zi0;
  Eigen::ArrayXd y(x.size());
  const Eigen::Index nsec = sos.rows();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double v = x[i];
    for (Eigen::Index s = 0; s < nsec; ++s) {
      const double out = sos(s, 0) * v + z(s, 0);
      z(s, 0) = sos(s, 1) * v - sos(s, 4) * out + z(s, 1);
      z(s, 1) = sos(s, 2) * v - sos(s, 5) * out;
      v = out;
    }
    y[i] = v;
  }
  return y;
}

}  // namespace

Eigen::ArrayXd sos_filter(const SosMatrix& sos, const Eigen::ArrayXd& x) {
  return run_sos(sos, x, Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(sos.rows(), 2));
}

Eigen::Matrix<double, Eigen::Dynamic, 2> sos_filter_zi(const SosMatrix& sos) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> zi(sos.rows(), 2);
  double scale = 1.0;
  for (Eigen::Index s = 0; s < sos.rows(); ++s) {
    const auto b = sos.row(s).head<3>();
    const auto a = sos.row(s).tail<3>();
    const double gain = b.sum() / a.sum();
    // Steady state of the transposed direct form for a constant input of one.
    const double z1 = b(2) - a(2) * gain;
    const double z0 = b(1) - a(1) * gain + z1;
    zi(s, 0) = scale * z0;
    zi(s, 1) = scale * z1;
    scale *= gain;
  }
  return zi;
}

Eigen::ArrayXd sos_filtfilt(const SosMatrix& sos, const Eigen::ArrayXd& x) {
  const Eigen::Index n = x.size();
  if (n < 2) throw TooShortError("zero-phase filtering needs at least two samples");
  Eigen::Index edge = 3 * (2 * sos.rows() + 1);
  edge = std::min(edge, n - 1);

  Eigen::ArrayXd ext(n + 2 * edge);
  ext.segment(edge, n) = x;
  for (Eigen::Index j = 1; j <= edge; ++j) {
    ext[edge - j] = 2.0 * x[0] - x[j];
    ext[edge + n - 1 + j] = 2.0 * x[n - 1] - x[n - 1 - j];
  }
  const auto zi = sos_filter_zi(sos);
  Eigen::ArrayXd fwd = run_sos(sos, ext, zi * ext[0]);
  Eigen::ArrayXd rev = fwd.reverse();
  Eigen::ArrayXd back = run_sos(sos, rev, zi * rev[0]);
  return back.reverse().segment(edge, n);
}

double sos_gain(const SosMatrix& sos, double freq) {
  using cplx = std::complex<double>;
  const cplx z1 = std::polar(1.0, -std::numbers::pi * freq);
  const cplx z2 = z1 * z1;
  cplx h(1.0, 0.0);
  for (Eigen::Index s = 0; s < sos.rows(); ++s)
    h *= (sos(s, 0) + sos(s, 1) * z1 + sos(s, 2) * z2) / (sos(s, 3) + sos(s, 4) * z1 + sos(s, 5) * z2);
  return std::abs(h);
}

Eigen::Index effective_support(const SosMatrix& sos, double tail_fraction) {
  constexpr Eigen::Index kLength = 1 << 15;
  Eigen::ArrayXd impulse = Eigen::ArrayXd::Zero(kLength);
  impulse[0] = 1.0;
  const Eigen::ArrayXd h = sos_filter(sos, impulse).abs();
  const double total = h.sum();
  double tail = total;
  for (Eigen::Index i = 0; i < kLength; ++i) {
    tail -= h[i];
    if (tail < tail_fraction * total) return i + 1;
  }
  return kLength;
}

}  // namespace gazebench
