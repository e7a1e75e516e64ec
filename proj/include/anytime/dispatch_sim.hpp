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

// Discrete-event model of an inference server: one accelerator running one
// non-preemptive stage at a time, requests arriving over time, and a
// scheduler invoked on every arrival and every stage completion.

#ifndef ANYTIME_DISPATCH_SIM_HPP_
#define ANYTIME_DISPATCH_SIM_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anytime/depth_planner.hpp"
#include "anytime/utility.hpp"
#include "anytime/workload.hpp"

namespace anytime {

struct PlannerPolicy {
  UtilityModel model = UtilityModel::kExponentialIncrease;
  QuantConfig quant = QuantConfig::fixed(0.1);
  DropMode drop = DropMode::kAllowed;
};
struct EdfPolicy {};  // earliest adjusted deadline, always to full depth
struct LcfPolicy {};  // least current confidence, ties to earlier deadline
struct RrPolicy {};   // stage-level round robin in arrival order

using Policy = std::variant<PlannerPolicy, EdfPolicy, LcfPolicy, RrPolicy>;

/// "planner-exp", "planner-max", "planner-lin", "planner-oracle", "edf",
/// "lcf", "rr". Planner policies get delta 0.1 and drop mode "allow".
Policy parse_policy(std::string_view name);
std::string policy_name(const Policy& policy);

enum class CostMode {
  kNone,      // scheduling is free
  kModeled,   // fixed cost per invocation plus per unit of planner work
  kMeasured,  // wall-clock time of the scheduler code (not reproducible)
};

std::string_view to_string(CostMode mode);
CostMode parse_cost_mode(std::string_view name);

/// Simulated CPU time charged for each scheduler invocation. Scheduler work
/// runs on the CPU and delays the next dispatch when it outlasts the
/// running stage.
struct SchedulerCost {
  CostMode mode = CostMode::kModeled;
  double per_invocation = 5e-6;  // seconds
  double per_unit = 2e-8;        // seconds per table cell option / candidate
};

struct SimConfig {
  double cpu_overhead = 0.0;  // subtracted from every deadline
  double prior = 0.1;         // confidence assumed before any stage ran
  SchedulerCost cost;
  double jitter = 0.0;        // stage time drawn from wcet * (1 - jitter * U)
  std::uint64_t seed = 1;
  bool record_stages = false;
};

struct JobOutcome {
  JobId id = 0;
  int client = 0;
  double arrival = 0.0;
  double raw_deadline = 0.0;
  double adjusted_deadline = 0.0;
  double retired_at = 0.0;
  int depth_executed = 0;        // stages finished by the raw deadline
  bool finished_by_deadline = false;  // no executed stage ran past it
  bool final_correct = false;
  double final_confidence = 0.0;
  bool missed = true;            // depth_executed == 0
};

struct StageRecord {
  JobId id = 0;
  int depth = 0;
  double start = 0.0;
  double end = 0.0;
};

struct SimReport {
  std::string policy;
  std::size_t jobs = 0;
  double accuracy = 1.0;             // correct / all jobs (misses count wrong)
  double accuracy_non_missed = 1.0;  // correct / jobs with a result
  double miss_rate = 0.0;
  double mean_depth = 0.0;
  double scheduler_overhead_fraction = 0.0;  // sched / (sched + accelerator)
  double scheduler_time = 0.0;
  double busy_time = 0.0;
  double makespan = 0.0;
  double realized_confidence = 0.0;  // sum over jobs of final confidence
  // Planner stages that completed after their job's adjusted deadline.
  std::uint64_t adjusted_deadline_violations = 0;
  std::uint64_t planner_invocations = 0;
  std::uint64_t rows_rebuilt = 0;
  std::uint64_t reassignments = 0;
  std::vector<JobOutcome> outcomes;  // by job id
  std::vector<StageRecord> stages;   // dispatch order, when recorded
};

/// Scheduler's view of one waiting job.
struct ReadyJob {
  JobId id = 0;
  std::uint64_t seq = 0;       // arrival order
  double deadline = 0.0;       // adjusted
  double raw_deadline = 0.0;
  double confidence = -1.0;    // latest observed; negative before any stage
  int done = 0;
  int target = 0;              // stages the policy intends to run
};

/// Job to run next on an idle accelerator, if any. Jobs whose raw deadline
/// has passed or that have reached their target are never chosen. Baselines
/// do not check whether a stage can still finish in time.
std::optional<JobId> pick_next(const Policy& policy,
                               std::span<const ReadyJob> ready, double now,
                               std::optional<std::uint64_t> last_served);

/// Deterministic for identical inputs, except under CostMode::kMeasured.
SimReport run(const Workload& workload, const Policy& policy,
              const SimConfig& config);

}  // namespace anytime

#endif  // ANYTIME_DISPATCH_SIM_HPP_
