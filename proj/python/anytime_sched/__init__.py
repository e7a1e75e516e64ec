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
"""Depth planning and simulation for multi-exit inference jobs."""

from ._anytime import (
    DepthPlan,
    InfeasibleError,
    InstanceTooLargeError,
    OracleResult,
    PlanTask,
    TraceLibrary,
    brute_force,
    load_trace,
    plan,
    predict_next,
    profile_wcet,
    quantize,
    simulate,
    synth_library,
)

__all__ = [
    "DepthPlan",
    "InfeasibleError",
    "InstanceTooLargeError",
    "OracleResult",
    "PlanTask",
    "TraceLibrary",
    "brute_force",
    "load_trace",
    "plan",
    "predict_next",
    "profile_wcet",
    "quantize",
    "simulate",
    "synth_library",
]
