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

#pragma once

#include <Eigen/Dense>

namespace gazebench {

/// Cascade of biquads; each row is (b0, b1, b2, a0, a1, a2) with a0 = 1.
using SosMatrix = Eigen::Matrix<double, Eigen::Dynamic, 6, Eigen::RowMajor>;

/// Digital Chebyshev type-I low-pass of even `order`, `ripple_db` pass-band
/// ripple and cutoff `cutoff` as a fraction of Nyquist (0 < cutoff < 1),
/// designed by bilinear transform of the analog prototype. Each section is
/// scaled to unit DC gain, so the cascade passes constants unchanged.
SosMatrix cheby1_lowpass(int order, double ripple_db, double cutoff);

/// Causal filtering, transposed direct form II, zero initial state.
Eigen::ArrayXd sos_filter(const SosMatrix& sos, const Eigen::ArrayXd& x);

/// Steady-state initial conditions for a unit step, one (z0, z1) row per section.
Eigen::Matrix<double, Eigen::Dynamic, 2> sos_filter_zi(const SosMatrix& sos);

/// Forward-backward (zero-phase) filtering with odd extension at both ends
/// and steady-state initial conditions.
Eigen::ArrayXd sos_filtfilt(const SosMatrix& sos, const Eigen::ArrayXd& x);

/// Complex frequency response magnitude at `freq` (fraction of Nyquist).
double sos_gain(const SosMatrix& sos, double freq);

/// Smallest n such that the impulse-response tail beyond n carries less than
/// `tail_fraction` of the total absolute response.
Eigen::Index effective_support(const SosMatrix& sos, double tail_fraction = 1e-3);

}  // namespace gazebench
