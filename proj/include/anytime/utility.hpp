// Copyright 2026 The anytime-sched Authors
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

// Prediction of the confidence a job will reach at deeper exits, given the
// confidence observed at its current exit.

#ifndef ANYTIME_UTILITY_HPP_
#define ANYTIME_UTILITY_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "anytime/task_model.hpp"

namespace anytime {

enum class UtilityModel {
  kMaxIncrease,          // next exit reaches confidence 1
  kExponentialIncrease,  // next exit halves the distance to 1
  kLinearIncrease,       // confidence grows with cumulative execution time
  kOracle,               // true trace confidences, known ahead of time
};

std::string_view to_string(UtilityModel model);
/// Accepts "max", "exp", "lin", "oracle". Throws std::invalid_argument.
UtilityModel parse_utility_model(std::string_view name);

/// Predicted reward R^l for depths l in [first_depth, last_depth()].
struct RewardCurve {
  int first_depth = 0;
  std::vector<double> values;

  int last_depth() const {
    return first_depth + static_cast<int>(values.size()) - 1;
  }
  /// std::out_of_range outside [first_depth, last_depth()].
  double at(int depth) const;
};

/// One step of the heuristic. `oracle_next` must be set exactly when the
/// model is kOracle; a missing value throws std::invalid_argument.
double predict_next(UtilityModel model, double r_cur, double p_cur,
                    double p_next, std::optional<double> oracle_next = {});

/// Curve from the confidence observed at depth `observed_depth` out to the
/// job's last stage, applying predict_next once per stage. Depth 0 means no
/// stage has run yet; `r_observed` is then the prior.
///
/// For kOracle, `oracle_trace` holds the per-stage confidences (one per
/// stage) and is copied verbatim beyond the observed depth.
RewardCurve predict_curve(UtilityModel model, double r_observed,
                          int observed_depth, const AdjustedJob& adjusted,
                          std::optional<std::span<const double>> oracle_trace =
                              std::nullopt);

}  // namespace anytime

#endif  // ANYTIME_UTILITY_HPP_
