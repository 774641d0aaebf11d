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

#include "gazebench/fitting.hpp"

#include <string>

namespace gazebench {

std::string_view to_string(FitModel m) { return m == FitModel::Log ? "log" : "linear"; }

FitModel parse_fit_model(std::string_view text) {
  if (text == "log") return FitModel::Log;
  if (text == "linear") return FitModel::Linear;
  throw ArgumentError("unknown fit model '" + std::string(text) + "' (expected linear or log)");
}

}  // namespace gazebench
