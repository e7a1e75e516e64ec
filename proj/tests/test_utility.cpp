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

#include <cmath>
#include <stdexcept>
#include <vector>

#include "anytime/utility.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace anytime;

namespace {

AdjustedJob job_with(std::vector<double> wcet) {
  Job j;
  j.rel_deadline = 10.0;
  for (double w : wcet) j.stages.push_back({w, 0.5, true});
  return adjust_deadline(j, 0.0);
}

}  // namespace

TEST_CASE("predict_next closed forms") {
  CHECK(predict_next(UtilityModel::kExponentialIncrease, 0.6, 1, 2) == doctest::Approx(0.8));
  CHECK(predict_next(UtilityModel::kMaxIncrease, 0.3, 1, 2) == 1.0);
  CHECK(predict_next(UtilityModel::kLinearIncrease, 0.5, 0.04, 0.06) == doctest::Approx(0.75));
  CHECK(predict_next(UtilityModel::kLinearIncrease, 0.8, 0.04, 0.08) == 1.0);
  CHECK(predict_next(UtilityModel::kOracle, 0.2, 1, 2, 0.7) == 0.7);
}

TEST_CASE("predict_next configuration errors") {
  CHECK_THROWS_AS(predict_next(UtilityModel::kOracle, 0.2, 1, 2), std::invalid_argument);
  CHECK_THROWS_AS(predict_next(UtilityModel::kLinearIncrease, 0.2, 0, 2), std::invalid_argument);
  CHECK_THROWS_AS(parse_utility_model("median"), std::invalid_argument);
  CHECK(parse_utility_model("lin") == UtilityModel::kLinearIncrease);
  CHECK(to_string(UtilityModel::kOracle) == "oracle");
}

TEST_CASE("predict_curve iterates per stage") {
  const AdjustedJob a = job_with({1, 1, 1});
  const RewardCurve exp = predict_curve(UtilityModel::kExponentialIncrease, 0.6, 1, a);
  CHECK(exp.first_depth == 1);
  REQUIRE(exp.values.size() == 3);
  CHECK(exp.at(1) == doctest::Approx(0.6));
  CHECK(exp.at(2) == doctest::Approx(0.8));
  CHECK(exp.at(3) == doctest::Approx(0.9));
  CHECK_THROWS_AS(exp.at(0), std::out_of_range);

  const std::vector<double> trace{0.55, 0.71, 0.90};
  const RewardCurve oracle = predict_curve(UtilityModel::kOracle, 0.55, 1, a, trace);
  CHECK(oracle.values == trace);

  const AdjustedJob two = job_with({1, 1});
  const RewardCurve mx = predict_curve(UtilityModel::kMaxIncrease, 0.4, 1, two);
  CHECK(mx.values == std::vector<double>{0.4, 1.0});
}

TEST_CASE("predict_curve from depth zero starts at the prior") {
  const AdjustedJob a = job_with({1, 1, 1});
  const RewardCurve exp = predict_curve(UtilityModel::kExponentialIncrease, 0.1, 0, a);
  CHECK(exp.first_depth == 0);
  CHECK(exp.at(1) == doctest::Approx(0.55));
  const RewardCurve lin = predict_curve(UtilityModel::kLinearIncrease, 0.1, 0, a);
  CHECK(lin.at(1) == 1.0);
  CHECK(predict_curve(UtilityModel::kLinearIncrease, 0.0, 0, a).at(3) == 0.0);
  const RewardCurve lin2 = predict_curve(UtilityModel::kLinearIncrease, 0.3, 1, a);
  CHECK(lin2.at(2) == doctest::Approx(0.6));
  CHECK(lin2.at(3) == doctest::Approx(0.9));
  CHECK_THROWS_AS(predict_curve(UtilityModel::kOracle, 0.1, 0, a), std::invalid_argument);
  CHECK_THROWS_AS(predict_curve(UtilityModel::kExponentialIncrease, 0.1, 4, a), std::out_of_range);
}

TEST_CASE("property: heuristic invariants on random inputs") {
  testing::Gen g(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const double r = g.uniform(0.0, 1.0);
    const double p = g.uniform(0.001, 1.0);
    const double q = p + g.uniform(0.0, 1.0);
    const double e = predict_next(UtilityModel::kExponentialIncrease, r, p, q);
    CHECK(e >= r);
    CHECK(e <= 1.0);
    CHECK(predict_next(UtilityModel::kLinearIncrease, r, p, p) == doctest::Approx(r));
    CHECK(predict_next(UtilityModel::kLinearIncrease, r, p, q) <= 1.0);

    const int stages = g.integer(1, 6);
    std::vector<double> wcet(static_cast<std::size_t>(stages));
    for (double& w : wcet) w = g.uniform(0.001, 0.1);
    const AdjustedJob a = job_with(wcet);
    const int obs = g.integer(1, stages);
    const RewardCurve c = predict_curve(UtilityModel::kExponentialIncrease, r, obs, a);
    for (int l = obs; l <= stages; ++l) {
      CHECK(c.at(l) == doctest::Approx(1.0 - (1.0 - r) / std::pow(2.0, l - obs)).epsilon(1e-12));
      if (l > obs) CHECK(c.at(l) >= c.at(l - 1));
    }
  }
  CHECK(predict_next(UtilityModel::kExponentialIncrease, 1.0, 1, 2) == 1.0);
}
