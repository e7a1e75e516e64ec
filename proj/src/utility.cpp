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

#include "anytime/utility.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace anytime {

std::string_view to_string(UtilityModel model) {
  switch (model) {
    case UtilityModel::kMaxIncrease:
      return "max";
    case UtilityModel::kExponentialIncrease:
      return "exp";
    case UtilityModel::kLinearIncrease:
      return "lin";
    case UtilityModel::kOracle:
      return "oracle";
  }
  return "?";
}

UtilityModel parse_utility_model(std::string_view name) {
  if (name == "max") return UtilityModel::kMaxIncrease;
  if (name == "exp") return UtilityModel::kExponentialIncrease;
  if (name == "lin") return UtilityModel::kLinearIncrease;
  if (name == "oracle") return UtilityModel::kOracle;
  throw std::invalid_argument("unknown utility model '" + std::string(name) +
                              "'");
}

double RewardCurve::at(int depth) const {
  if (depth < first_depth || depth > last_depth()) {
    throw std::out_of_range("reward curve has no depth " +
                            std::to_string(depth));
  }
  return values[static_cast<std::size_t>(depth - first_depth)];
}

double predict_next(UtilityModel model, double r_cur, double p_cur,
                    double p_next, std::optional<double> oracle_next) {
  switch (model) {
    case UtilityModel::kMaxIncrease:
      return 1.0;
    case UtilityModel::kExponentialIncrease:
      return r_cur + 0.5 * (1.0 - r_cur);
    case UtilityModel::kLinearIncrease:
      if (!(p_cur > 0.0)) {
        throw std::invalid_argument("linear prediction needs p_cur > 0");
      }
      return std::min(1.0, r_cur * p_next / p_cur);
    case UtilityModel::kOracle:
      if (!oracle_next) {
        throw std::invalid_argument(
            "oracle utility model requires the next true confidence");
      }
      return *oracle_next;
  }
  return r_cur;
}

RewardCurve predict_curve(UtilityModel model, double r_observed,
                          int observed_depth, const AdjustedJob& adjusted,
                          std::optional<std::span<const double>> oracle_trace) {
  const int last = adjusted.num_stages();
  if (observed_depth < 0 || observed_depth > last) {
    throw std::out_of_range("observed depth outside [0, L]");
  }
  if (model == UtilityModel::kOracle) {
    if (!oracle_trace) {
      throw std::invalid_argument(
          "oracle utility model requires the confidence trace");
    }
    if (static_cast<int>(oracle_trace->size()) != last) {
      throw std::invalid_argument("oracle trace length != number of stages");
    }
  }

  RewardCurve curve;
  curve.first_depth = observed_depth;
  curve.values.reserve(static_cast<std::size_t>(last - observed_depth + 1));
  curve.values.push_back(r_observed);
  for (int l = observed_depth; l < last; ++l) {
    const double r = curve.values.back();
    double next = 0.0;
    if (model == UtilityModel::kOracle) {
      next = predict_next(model, r, 0.0, 0.0,
                          (*oracle_trace)[static_cast<std::size_t>(l)]);
    } else if (model == UtilityModel::kLinearIncrease && l == 0) {
      // Nothing has executed: the growth ratio P^1 / P^0 is unbounded.
      next = r > 0.0 ? 1.0 : 0.0;
    } else {
      next = predict_next(model, r, adjusted.cum_exec[l],
                          adjusted.cum_exec[l + 1]);
    }
    curve.values.push_back(next);
  }
  return curve;
}

}  // namespace anytime
