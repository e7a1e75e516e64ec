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

#include <stdexcept>
#include <vector>

#include "anytime/depth_planner.hpp"
#include "anytime/oracle.hpp"
#include "doctest.h"
#include "generators.hpp"

using namespace anytime;

namespace {

PlanTask fresh(JobId id, double deadline, std::vector<double> wcet,
               std::vector<double> reward, int mandatory = 1) {
  return make_plan_task(id, deadline, wcet, reward, mandatory);
}

// A job that has completed `done` stages and whose curve (depths done..L)
// was re-predicted.
PlanTask in_flight(JobId id, double deadline, std::vector<double> wcet, int done,
                   const RewardCurve& curve) {
  Job j;
  j.id = id;
  for (double w : wcet) j.stages.push_back({w, 0.5, true});
  j.rel_deadline = 1.0;
  AdjustedJob a = adjust_deadline(j, 0.0);
  a.d_adj = deadline;
  return make_plan_task(a, done, curve);
}

double total_gain(const std::vector<int>& depth, const std::vector<PlanTask>& tasks) {
  double s = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    s += tasks[i].gain[static_cast<std::size_t>(depth[i])];
  }
  return s;
}

}  // namespace

TEST_CASE("quantize floors reward over delta") {
  CHECK(quantize(0.57, 0.1) == 5);
  CHECK(quantize(1.0, 0.1) == 10);
  CHECK(quantize(0.09, 0.1) == 0);
  CHECK(quantize(0.3, 0.1) == 3);
  CHECK(quantize(0.7, 0.1) == 7);
}

TEST_CASE("choose_delta is epsilon R over N") {
  CHECK(choose_delta(0.2, 1.0, 4) == doctest::Approx(0.05));
  CHECK(choose_delta(0.1, 0.8, 8) == doctest::Approx(0.01));
  CHECK(choose_delta(0.5, 1.0, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(choose_delta(1.0, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(choose_delta(0.5, 1.0, 0), std::invalid_argument);

  // R only counts rewards a task can reach by its own deadline.
  const std::vector<PlanTask> tasks{fresh(0, 2, {1, 1, 1}, {0.4, 0.7, 0.9})};
  CHECK(choose_delta(0.5, tasks, 0.0) == doctest::Approx(0.35));
}

TEST_CASE("single-task table") {
  const std::vector<PlanTask> tasks{fresh(0, 2, {1, 1, 1}, {0.4, 0.7, 0.9})};
  const DpTable t = build_table(tasks, 0.1, 0.0, DropMode::kAllowed);
  REQUIRE(t.size() == 1);
  CHECK(t.time_at(0, 0) == 0.0);
  CHECK(t.time_at(0, 4) == 1.0);
  CHECK(t.time_at(0, 7) == 2.0);
  CHECK(t.time_at(0, 9) == DpTable::kInf);
  for (int r : {1, 2, 3, 5, 6, 8}) CHECK(t.time_at(0, r) == DpTable::kInf);

  const DepthPlan p = extract_plan(t, tasks);
  CHECK(p.depth == std::vector<int>{2});
  CHECK(p.quantized_reward == 7);
  CHECK(p.predicted_reward == doctest::Approx(0.7));
}

TEST_CASE("two-task table reaches reward 13 at time 3") {
  const std::vector<PlanTask> tasks{fresh(1, 1, {1}, {0.5}),
                                    fresh(2, 3, {1, 1}, {0.4, 0.8})};
  const DpTable t = build_table(tasks, 0.1, 0.0, DropMode::kAllowed);
  CHECK(t.time_at(1, 13) == 3.0);
  const DepthPlan p = extract_plan(t, tasks);
  CHECK(p.ids == std::vector<JobId>{1, 2});
  CHECK(p.depth == std::vector<int>{1, 2});
  CHECK(p.quantized_reward == 13);
  CHECK(plan_is_feasible(p.depth, tasks, 0.0));
  // Independent check: brute force over the 2 x 3 depth vectors.
  const OracleResult opt = brute_force(tasks, 0.0, DropMode::kAllowed);
  CHECK(opt.reward == doctest::Approx(1.3));
  CHECK(opt.depth == p.depth);
}

TEST_CASE("empty and out-of-range rebuilds") {
  const std::vector<PlanTask> none;
  const DpTable empty = build_table(none, 0.1, 0.0, DropMode::kAllowed);
  const DepthPlan p = extract_plan(empty, none);
  CHECK(p.depth.empty());
  CHECK(p.quantized_reward == 0);

  const std::vector<PlanTask> tasks{fresh(1, 1, {1}, {0.5}),
                                    fresh(2, 3, {1, 1}, {0.4, 0.8})};
  DpTable t = build_table(tasks, 0.1, 0.0, DropMode::kAllowed);
  const DpTable before = t;
  CHECK(build_table(tasks, 0.1, 0.0, DropMode::kAllowed, t, 5) == 0);
  CHECK(t.rows == before.rows);
  CHECK_THROWS_AS(build_table(tasks, 0.2, 0.0, DropMode::kAllowed, t, 1), std::logic_error);
  CHECK_THROWS_AS(build_table(tasks, 0.0, 0.0, DropMode::kAllowed), std::invalid_argument);
}

TEST_CASE("mandatory mode forces the mandatory part or fails") {
  // Two jobs that each need 1 unit by time 1: only one fits.
  const std::vector<PlanTask> clash{fresh(1, 1, {1}, {0.5}), fresh(2, 1, {1}, {0.6})};
  const DpTable allow = build_table(clash, 0.1, 0.0, DropMode::kAllowed);
  CHECK(extract_plan(allow, clash).depth == std::vector<int>{0, 1});
  const DpTable strict = build_table(clash, 0.1, 0.0, DropMode::kMandatoryEnforced);
  CHECK_THROWS_AS(extract_plan(strict, clash), InfeasibleError);

  // Zero-reward jobs still run their mandatory part.
  const std::vector<PlanTask> zero{fresh(1, 5, {1, 1}, {0.0, 0.0})};
  const DpTable z = build_table(zero, 0.1, 0.0, DropMode::kMandatoryEnforced);
  CHECK(extract_plan(z, zero).depth == std::vector<int>{1});
  CHECK(extract_plan(build_table(zero, 0.1, 0.0, DropMode::kAllowed), zero).depth ==
        std::vector<int>{0});
}

TEST_CASE("the live clock shifts feasibility") {
  const std::vector<PlanTask> tasks{fresh(0, 2, {1, 1, 1}, {0.4, 0.7, 0.9})};
  CHECK(extract_plan(build_table(tasks, 0.1, 1.0, DropMode::kAllowed), tasks).depth ==
        std::vector<int>{1});
  CHECK(extract_plan(build_table(tasks, 0.1, 1.5, DropMode::kAllowed), tasks).depth ==
        std::vector<int>{0});
}

TEST_CASE("greedy_reassign swaps a lowered stage for a better extension") {
  const RewardCurve old_curve{1, {0.5, 0.9}};
  const RewardCurve new_curve{1, {0.5, 0.6}};
  const std::vector<PlanTask> tasks{
      in_flight(1, 10, {1, 1}, 1, new_curve),
      fresh(2, 10, {1, 1}, {0.5, 0.8}),
  };
  DepthPlan plan;
  plan.ids = {1, 2};
  plan.depth = {2, 1};
  const ReassignResult r = greedy_reassign(plan, tasks, 0, old_curve, new_curve, 0.0, 0.1);
  CHECK(r.changed);
  CHECK(r.extended_rank == 1);
  CHECK(r.plan.depth == std::vector<int>{1, 2});
  CHECK(r.plan.predicted_reward == doctest::Approx(0.8));
  CHECK(total_gain(r.plan.depth, tasks) > total_gain(plan.depth, tasks));
}

TEST_CASE("greedy_reassign keeps the plan when prediction rises") {
  const RewardCurve old_curve{1, {0.5, 0.6}};
  const RewardCurve new_curve{1, {0.5, 0.9}};
  const std::vector<PlanTask> tasks{in_flight(1, 10, {1, 1}, 1, new_curve),
                                    fresh(2, 10, {1, 1}, {0.5, 0.8})};
  DepthPlan plan;
  plan.ids = {1, 2};
  plan.depth = {2, 1};
  const ReassignResult r = greedy_reassign(plan, tasks, 0, old_curve, new_curve, 0.0, 0.1);
  CHECK_FALSE(r.changed);
  CHECK(r.plan.depth == plan.depth);
  CHECK(r.candidates == 0);
}

TEST_CASE("greedy_reassign keeps the plan when nothing fits the budget") {
  const RewardCurve old_curve{1, {0.5, 0.9}};
  const RewardCurve new_curve{1, {0.5, 0.6}};
  const std::vector<PlanTask> tasks{in_flight(1, 10, {1, 1}, 1, new_curve),
                                    fresh(2, 10, {1, 3}, {0.5, 0.8})};
  DepthPlan plan;
  plan.ids = {1, 2};
  plan.depth = {2, 1};
  const ReassignResult r = greedy_reassign(plan, tasks, 0, old_curve, new_curve, 0.0, 0.1);
  CHECK_FALSE(r.changed);
  CHECK(r.plan.depth == plan.depth);
}

TEST_CASE("greedy_reassign rejects extensions that break a later deadline") {
  const RewardCurve old_curve{1, {0.5, 0.9}};
  const RewardCurve new_curve{1, {0.5, 0.6}};
  // Extending job 2 delays job 3 past its deadline of 2.
  const std::vector<PlanTask> tasks{in_flight(1, 10, {1, 1}, 1, new_curve),
                                    fresh(2, 1.5, {1, 1}, {0.5, 0.9}),
                                    fresh(3, 2, {1}, {0.5})};
  DepthPlan plan;
  plan.ids = {1, 2, 3};
  plan.depth = {2, 1, 1};
  const ReassignResult r = greedy_reassign(plan, tasks, 0, old_curve, new_curve, 0.0, 0.1);
  CHECK_FALSE(r.changed);
}

TEST_CASE("property: skip dominance and EDF feasibility of every plan") {
  testing::Gen g(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<PlanTask> tasks = g.instance(6, 4);
    const double delta = g.uniform(0.02, 0.3);
    const DpTable t = build_table(tasks, delta, 0.0, DropMode::kAllowed);
    for (std::size_t i = 1; i < t.size(); ++i) {
      for (int r = 0; r <= t.rows[i - 1].width; ++r) {
        CHECK(t.time_at(i, r) <= t.time_at(i - 1, r));
      }
    }
    const DepthPlan p = extract_plan(t, tasks);
    CHECK(plan_is_feasible(p.depth, tasks, 0.0));
    // Every finite cell is reachable within the row deadlines.
    for (std::size_t i = 0; i < t.size(); ++i) {
      for (int r = 0; r <= t.rows[i].width; ++r) {
        if (t.time_at(i, r) != DpTable::kInf && t.rows[i].depth[static_cast<std::size_t>(r)] > 0) {
          CHECK(t.time_at(i, r) <= tasks[i].deadline + kTimeEps);
        }
      }
    }
  }
}

TEST_CASE("property: (1 - eps) bound and exactness on aligned rewards") {
  testing::Gen g(33);
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<PlanTask> tasks = g.instance(6, 4);
    const OracleResult opt = brute_force(tasks, 0.0, DropMode::kAllowed);
    for (double eps : {0.1, 0.25, 0.5}) {
      const double delta = choose_delta(eps, tasks, 0.0);
      const DepthPlan p = extract_plan(build_table(tasks, delta, 0.0, DropMode::kAllowed), tasks);
      CHECK(p.predicted_reward >= (1.0 - eps) * opt.reward - 1e-12);
    }
    const std::vector<PlanTask> grid = g.instance(6, 4, 10);
    const OracleResult gopt = brute_force(grid, 0.0, DropMode::kAllowed);
    const DepthPlan gp = extract_plan(build_table(grid, 0.1, 0.0, DropMode::kAllowed), grid);
    CHECK(gp.predicted_reward == doctest::Approx(gopt.reward).epsilon(1e-9));
  }
}

TEST_CASE("property: mandatory plans match the oracle on aligned rewards") {
  testing::Gen g(34);
  int feasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::vector<PlanTask> tasks = g.instance(4, 3, 10);
    const OracleResult opt = brute_force(tasks, 0.0, DropMode::kMandatoryEnforced);
    const DpTable t = build_table(tasks, 0.1, 0.0, DropMode::kMandatoryEnforced);
    if (!opt.feasible) {
      CHECK_THROWS_AS(extract_plan(t, tasks), InfeasibleError);
      continue;
    }
    ++feasible;
    const DepthPlan p = extract_plan(t, tasks);
    CHECK(p.predicted_reward == doctest::Approx(opt.reward).epsilon(1e-9));
    for (std::size_t i = 0; i < tasks.size(); ++i) CHECK(p.depth[i] >= tasks[i].mandatory);
  }
  CHECK(feasible > 0);
}

TEST_CASE("property: incremental insertion equals a full rebuild") {
  testing::Gen g(44);
  for (int trial = 0; trial < 200; ++trial) {
    Planner planner(QuantConfig::fixed(0.1), DropMode::kAllowed);
    const std::vector<PlanTask> pool = g.instance(8, 4);
    std::vector<PlanTask> shuffled = pool;
    std::shuffle(shuffled.begin(), shuffled.end(), g.engine());
    for (const PlanTask& t : shuffled) {
      planner.add_task(t, 0.0);
      const std::vector<PlanTask> now(planner.tasks().begin(), planner.tasks().end());
      const DpTable full = build_table(now, 0.1, 0.0, DropMode::kAllowed);
      REQUIRE(planner.table().rows.size() == full.rows.size());
      CHECK(planner.table().rows == full.rows);
      std::size_t rank = 0;
      while (now[rank].id != t.id) ++rank;
      CHECK(planner.rows_rebuilt_last() == now.size() - rank);
      CHECK(planner.plan().depth == extract_plan(full, now).depth);
    }
  }
}

TEST_CASE("property: greedy never lowers predicted reward or feasibility") {
  testing::Gen g(55);
  int swaps = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<PlanTask> tasks = g.instance(5, 4);
    const DepthPlan plan = extract_plan(build_table(tasks, 0.05, 0.0, DropMode::kAllowed), tasks);
    // Pick a job planned two or more stages deep and let its first stage run.
    std::size_t cur = tasks.size();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (plan.depth[i] >= 2) cur = i;
    }
    if (cur == tasks.size()) continue;
    PlanTask& c = tasks[cur];
    const int stages = c.num_stages();
    RewardCurve old_curve{1, {}};
    for (int l = 1; l <= stages; ++l) old_curve.values.push_back(c.gain[static_cast<std::size_t>(l)]);
    RewardCurve new_curve{1, {old_curve.values[0]}};
    for (int l = 2; l <= stages; ++l) {
      new_curve.values.push_back(std::max(new_curve.values.back(),
                                          old_curve.values[static_cast<std::size_t>(l - 1)] * g.uniform(0.0, 1.2)));
    }
    std::vector<double> wcet;
    for (int l = 1; l <= stages; ++l) wcet.push_back(c.exec(l - 1, l));
    // The finished stage ran first, so everyone else starts after it.
    const double now = c.exec(0, 1);
    c = in_flight(c.id, c.deadline, wcet, 1, new_curve);
    const ReassignResult r = greedy_reassign(plan, tasks, cur, old_curve, new_curve, now, 0.05);
    CHECK(total_gain(r.plan.depth, tasks) >= total_gain(plan.depth, tasks) - 1e-12);
    if (plan_is_feasible(plan.depth, tasks, now)) {
      CHECK(plan_is_feasible(r.plan.depth, tasks, now));
    }
    if (r.changed) ++swaps;
  }
  CHECK(swaps > 0);
}

TEST_CASE("planner bookkeeping") {
  Planner p(QuantConfig::fixed(0.1), DropMode::kAllowed);
  p.add_task(fresh(2, 3, {1, 1}, {0.4, 0.8}), 0.0);
  p.add_task(fresh(1, 1, {1}, {0.5}), 0.0);
  CHECK(p.rows_rebuilt_last() == 2);
  CHECK(p.target(1) == 1);
  CHECK(p.target(2) == 2);
  CHECK_THROWS_AS(p.add_task(fresh(1, 1, {1}, {0.5}), 0.0), std::invalid_argument);
  p.set_target(2, 1);
  CHECK(p.target(2) == 1);
  CHECK_THROWS_AS(p.set_target(2, 3), std::out_of_range);
  p.remove_task(1);
  CHECK_FALSE(p.contains(1));
  CHECK_THROWS_AS(p.target(1), std::out_of_range);
  p.replan(0.0);
  CHECK(p.target(2) == 2);
}

TEST_CASE("epsilon quantization follows the task set") {
  Planner p(QuantConfig::from_epsilon(0.5), DropMode::kAllowed);
  p.add_task(fresh(1, 10, {1}, {0.8}), 0.0);
  CHECK(p.delta() == doctest::Approx(0.4));
  p.add_task(fresh(2, 10, {1}, {0.6}), 0.0);
  CHECK(p.delta() == doctest::Approx(0.2));
  CHECK_THROWS_AS(QuantConfig::fixed(0.0), std::invalid_argument);
  CHECK_THROWS_AS(QuantConfig::from_epsilon(1.5), std::invalid_argument);
}
