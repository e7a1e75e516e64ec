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

#include <algorithm>
#include <vector>

#include "anytime/oracle.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace anytime;

TEST_CASE("single task picks its best feasible depth") {
  const std::vector<PlanTask> tasks{make_plan_task(0, 5, std::vector<double>{1, 1},
                                                   std::vector<double>{0.4, 0.7})};
  const OracleResult r = brute_force(tasks, 0.0, DropMode::kAllowed);
  CHECK(r.feasible);
  CHECK(r.reward == doctest::Approx(0.7));
  CHECK(r.depth == std::vector<int>{2});
  CHECK(r.examined == 3);
}

TEST_CASE("two-task instance has optimum 1.3") {
  const std::vector<PlanTask> tasks{
      make_plan_task(1, 1, std::vector<double>{1}, std::vector<double>{0.5}),
      make_plan_task(2, 3, std::vector<double>{1, 1}, std::vector<double>{0.4, 0.8})};
  const OracleResult r = brute_force(tasks, 0.0, DropMode::kAllowed);
  CHECK(r.reward == doctest::Approx(1.3));
  CHECK(r.depth == std::vector<int>{1, 2});
  // All 2 x 3 vectors fit: the deadlines allow every combination.
  CHECK(r.examined == 6);
}

TEST_CASE("only the mandatory parts fit") {
  const std::vector<PlanTask> tasks{
      make_plan_task(1, 1, std::vector<double>{1, 1}, std::vector<double>{0.3, 0.9}),
      make_plan_task(2, 2, std::vector<double>{1, 1}, std::vector<double>{0.2, 0.9})};
  const OracleResult r = brute_force(tasks, 0.0, DropMode::kMandatoryEnforced);
  CHECK(r.feasible);
  CHECK(r.reward == doctest::Approx(0.5));
  CHECK(r.depth == std::vector<int>{1, 1});
}

TEST_CASE("infeasible mandatory set and the size cap") {
  const std::vector<PlanTask> clash{
      make_plan_task(1, 1, std::vector<double>{1}, std::vector<double>{0.3}),
      make_plan_task(2, 1, std::vector<double>{1}, std::vector<double>{0.2})};
  CHECK_FALSE(brute_force(clash, 0.0, DropMode::kMandatoryEnforced).feasible);
  CHECK(brute_force(clash, 0.0, DropMode::kAllowed).reward == doctest::Approx(0.3));
  CHECK_THROWS_AS(brute_force(clash, 0.0, DropMode::kAllowed, 3), InstanceTooLargeError);
  CHECK(brute_force({}, 0.0, DropMode::kAllowed).feasible);
}

TEST_CASE("property: invariant to input order and always feasible") {
  testing::Gen g(9);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<PlanTask> tasks = g.instance(6, 3);
    const OracleResult a = brute_force(tasks, 0.0, DropMode::kAllowed);
    std::vector<std::size_t> perm(tasks.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), g.engine());
    std::vector<PlanTask> shuffled;
    for (std::size_t i : perm) shuffled.push_back(tasks[i]);
    const OracleResult b = brute_force(shuffled, 0.0, DropMode::kAllowed);
    CHECK(a.reward == b.reward);
    CHECK(a.examined == b.examined);
    for (std::size_t k = 0; k < perm.size(); ++k) CHECK(b.depth[k] == a.depth[perm[k]]);
    CHECK(plan_is_feasible(a.depth, tasks, 0.0));
  }
}
