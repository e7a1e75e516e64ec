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

// Experiment driver: single runs, parameter sweeps and the planner-vs-oracle
// validation suite, with CSV output.
//
// Simulate CSV columns:
//   policy,clients,d_lower,d_upper,delta,seed,jobs,accuracy,
//   accuracy_non_missed,miss_rate,mean_depth,scheduler_overhead_fraction
// Sweep CSV columns:
//   axis,value,policy,replications,accuracy_mean,accuracy_sd,miss_rate_mean,
//   miss_rate_sd,mean_depth,scheduler_overhead_fraction
// Per-job CSV columns:
//   id,client,arrival,raw_deadline,adjusted_deadline,retired_at,
//   depth_executed,missed,final_correct,final_confidence

#ifndef ANYTIME_EXPERIMENT_HPP_
#define ANYTIME_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "anytime/dispatch_sim.hpp"
#include "anytime/workload.hpp"

namespace anytime {

/// Policy by name with the planner's quantization and drop mode applied.
Policy make_policy(std::string_view name, const QuantConfig& quant,
                   DropMode drop);

enum class SweepAxis { kClients, kDUpper, kDLower, kDelta };

std::string_view to_string(SweepAxis axis);
/// Accepts "k", "du", "dl", "delta".
SweepAxis parse_sweep_axis(std::string_view name);

struct ExperimentPlan {
  SweepAxis axis = SweepAxis::kClients;
  std::vector<double> values;
  std::vector<std::string> policies;
  WorkloadSpec workload;   // seed is replaced per replication
  SimConfig sim;           // seed is replaced per replication
  QuantConfig quant = QuantConfig::fixed(0.1);
  DropMode drop = DropMode::kAllowed;
  int replications = 1;
  std::uint64_t seed_base = 1;
};

/// std::invalid_argument on empty value/policy lists, unknown policies or
/// replications < 1.
void validate(const ExperimentPlan& plan);

struct SweepRow {
  std::string axis;
  double value = 0.0;
  std::string policy;
  int replications = 0;
  double accuracy_mean = 0.0;
  double accuracy_sd = 0.0;
  double miss_rate_mean = 0.0;
  double miss_rate_sd = 0.0;
  double mean_depth = 0.0;
  double overhead_fraction = 0.0;
};

/// One simulation per (value, policy, replication). Rows come back in plan
/// order (values outer, policies inner) whatever the thread count.
std::vector<SweepRow> run_experiment(const ExperimentPlan& plan,
                                     const TraceLibrary& library,
                                     unsigned threads = 1);

struct SimulateRun {
  std::string policy;
  WorkloadSpec workload;
  double delta = 0.1;
  SimReport report;
};

void write_simulate_csv(std::ostream& out, const std::vector<SimulateRun>& runs);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_jobs_csv(std::ostream& out, const SimReport& report);

/// Sample mean and (n - 1) standard deviation.
struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;
};
MeanSd mean_sd(const std::vector<double>& xs);

struct FptasOptions {
  std::size_t instances = 1000;
  std::vector<double> epsilons{0.1, 0.25, 0.5};
  int max_tasks = 6;
  int max_stages = 4;
  std::uint64_t seed = 7;
};

struct FptasSummary {
  std::size_t checked = 0;
  std::size_t bound_violations = 0;   // planner < (1 - eps) * OPT
  std::size_t infeasible_plans = 0;   // plan breaks an adjusted deadline
  double worst_ratio = 1.0;           // min planner / OPT over OPT > 0
};

/// Random instances (N in [1, max_tasks], L in [1, max_stages], mandatory 1,
/// non-decreasing random rewards) planned with delta = eps * R / N and
/// compared against brute force.
FptasSummary validate_fptas(const FptasOptions& options);

}  // namespace anytime

#endif  // ANYTIME_EXPERIMENT_HPP_
