# Copyright 2026 The anytime-sched Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

import anytime_sched as at


def test_two_task_plan_matches_brute_force():
    tasks = [
        at.PlanTask(1, 1.0, [1.0], [0.5]),
        at.PlanTask(2, 3.0, [1.0, 1.0], [0.4, 0.8]),
    ]
    plan = at.plan(tasks, now=0.0, delta=0.1)
    assert list(plan.depth) == [1, 2]
    assert plan.predicted_reward == pytest.approx(1.3)
    assert at.brute_force(tasks, 0.0).reward == pytest.approx(1.3)


def test_quantize_and_predictions():
    assert at.quantize(0.3, 0.1) == 3
    assert at.predict_next("exp", 0.6, 0.01, 0.02) == pytest.approx(0.8)
    assert at.predict_next("max", 0.2, 0.01, 0.02) == 1.0
    with pytest.raises(ValueError):
        at.predict_next("quadratic", 0.2, 0.01, 0.02)


def test_mandatory_clash_raises():
    tasks = [at.PlanTask(1, 1.0, [1.0], [0.3]), at.PlanTask(2, 1.0, [1.0], [0.2])]
    with pytest.raises(at.InfeasibleError):
        at.plan(tasks, now=0.0, delta=0.1, drop_mode="mandatory")


def test_simulate_reports_metrics():
    lib = at.synth_library(records=200)
    assert lib.num_records == 200
    res = at.simulate(lib, "planner-exp", jobs=300, seed=3)
    assert res["jobs"] == 300
    assert 0.0 <= res["accuracy"] <= 1.0
    assert res["adjusted_deadline_violations"] == 0
    assert 0.0 < res["scheduler_overhead_fraction"] < 0.5
    assert res == at.simulate(lib, "planner-exp", jobs=300, seed=3)


def test_profile_wcet():
    assert at.profile_wcet([[1, 1, 1, 3]])[0] == pytest.approx(2.788)
