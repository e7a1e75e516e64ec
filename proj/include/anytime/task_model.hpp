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

#ifndef ANYTIME_TASK_MODEL_HPP_
#define ANYTIME_TASK_MODEL_HPP_

#include <cstdint>
#include <vector>

namespace anytime {

using JobId = std::uint64_t;

// Slack allowed when comparing a completion time against a deadline. Shared
// by the planner, the oracle and the simulator so all three agree on what
// "feasible" means.
inline constexpr double kTimeEps = 1e-12;

/// One exit of a multi-exit network: worst-case execution time of the stage
/// plus the confidence and correctness recorded for it in the trace.
struct StageProfile {
  double wcet = 0.0;
  double confidence = 0.0;
  bool correct = false;
};

/// An inference request. Stages run in order; `mandatory` is the minimum
/// depth when dropping is disallowed.
struct Job {
  JobId id = 0;
  double arrival = 0.0;
  double rel_deadline = 0.0;
  std::vector<StageProfile> stages;
  int mandatory = 1;

  double raw_deadline() const { return arrival + rel_deadline; }
  int num_stages() const { return static_cast<int>(stages.size()); }
};

/// Throws std::invalid_argument when the job violates the task-model
/// invariants (empty stages, non-positive wcet, confidence outside [0,1],
/// mandatory depth outside [1, L]).
void validate(const Job& job);

/// A job whose deadline has been pulled in by the CPU constant and one
/// worst-case stage, so that non-preemptive stage execution can be treated
/// with preemptive EDF reasoning.
struct AdjustedJob {
  Job job;
  double d_adj = 0.0;
  // cum_exec[L] = sum of the first L stage wcets; cum_exec[0] = 0.
  std::vector<double> cum_exec;

  int num_stages() const { return job.num_stages(); }
  double max_stage_wcet() const;
};

AdjustedJob adjust_deadline(const Job& job, double cpu_overhead);

/// P^depth for 1 <= depth <= L; std::out_of_range otherwise.
double cumulative_exec(const AdjustedJob& adjusted, int depth);

}  // namespace anytime

#endif  // ANYTIME_TASK_MODEL_HPP_
