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

#include <cmath>
#include <string_view>

#include "gazebench/types.hpp"

namespace gazebench {

enum class FitModel { Linear, Log };

std::string_view to_string(FitModel m);
FitModel parse_fit_model(std::string_view text);

/// y = a * x + b (Linear) or y = a * ln(x) + b (Log).
struct FitResult {
  FitModel model = FitModel::Linear;
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  int n_points = 0;
};

template <typename Scalar>
Scalar evaluate_model(FitModel model, Scalar a, Scalar b, Scalar x) {
  return model == FitModel::Log ? a * std::log(x) + b : a * x + b;
}

/// 1 - SSR/SST. With SST = 0 the result is 1 for a perfect fit, otherwise
/// DomainError.
template <typename DerivedX, typename DerivedY>
typename DerivedY::Scalar r_squared(const Eigen::MatrixBase<DerivedX>& x,
                                    const Eigen::MatrixBase<DerivedY>& y, FitModel model,
                                    typename DerivedY::Scalar a, typename DerivedY::Scalar b) {
  using Scalar = typename DerivedY::Scalar;
  if (x.size() != y.size() || x.size() < 1) throw ArgumentError("x and y must be equal, non-empty");
  const Scalar mean = y.mean();
  Scalar ssr = 0, sst = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (model == FitModel::Log && !(x(i) > 0)) throw DomainError("log model needs x > 0");
    const Scalar r = y(i) - evaluate_model<Scalar>(model, a, b, Scalar(x(i)));
    ssr += r * r;
    sst += (y(i) - mean) * (y(i) - mean);
  }
  if (sst == Scalar(0)) {
    if (ssr == Scalar(0)) return Scalar(1);
    throw DomainError("R^2 undefined: constant y with a non-zero residual");
  }
  return Scalar(1) - ssr / sst;
}

/// Ordinary least squares: a = Sxy / Sxx, b = mean(y) - a * mean(x).
template <typename DerivedX, typename DerivedY>
FitResult fit_linear(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedY::Scalar;
  if (x.size() != y.size()) throw ArgumentError("x and y differ in length");
  if (x.size() < 2) throw ArgumentError("a fit needs at least two points");
  const Scalar mx = x.mean();
  const Scalar my = y.mean();
  const auto dx = (x.array() - mx).eval();
  const Scalar sxx = dx.square().sum();
  if (!(sxx > Scalar(0))) throw DomainError("degenerate fit: all x values are equal");
  const Scalar sxy = (dx * (y.array() - my)).sum();
  FitResult f;
  f.model = FitModel::Linear;
  f.a = double(sxy / sxx);
  f.b = double(my - Scalar(f.a) * mx);
  f.r2 = double(r_squared(x, y, FitModel::Linear, Scalar(f.a), Scalar(f.b)));
  f.n_points = int(x.size());
  return f;
}

/// Linear fit on (ln x, y).
template <typename DerivedX, typename DerivedY>
FitResult fit_log(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedY>& y) {
  if ((x.array() <= 0).any()) throw DomainError("log model needs every x > 0");
  const auto lx = x.array().log().matrix().eval();
  FitResult f = fit_linear(lx, y);
  f.model = FitModel::Log;
  return f;
}

template <typename DerivedX, typename DerivedY>
FitResult fit(FitModel model, const Eigen::MatrixBase<DerivedX>& x,
              const Eigen::MatrixBase<DerivedY>& y) {
  return model == FitModel::Log ? fit_log(x, y) : fit_linear(x, y);
}

}  // namespace gazebench
