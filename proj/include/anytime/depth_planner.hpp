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

// Depth assignment for a set of anytime jobs sharing one non-preemptive
// accelerator.
//
// Jobs are ranked by adjusted deadline and executed in that order (EDF). For
// each job the planner picks how many stages to run so that the total reward
// is maximal and every job that runs a stage finishes by its deadline. Rewards
// are quantized to multiples of `delta`; the table row for rank i holds, for
// every quantized total reward r, the least execution time with which ranks
// 0..i reach exactly r. Choosing delta = epsilon * R / N (R the largest
// single-job reward) makes the plan a (1 - epsilon) approximation.
//
// Completed and in-flight stages are sunk: a PlanTask carries `done`, the
// number of stages already committed, and `gain[l]`, the reward of stopping
// at depth l minus the reward already secured.

#ifndef ANYTIME_DEPTH_PLANNER_HPP_
#define ANYTIME_DEPTH_PLANNER_HPP_

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "anytime/task_model.hpp"
#include "anytime/utility.hpp"

namespace anytime {

enum class DropMode {
  kAllowed,            // a job may receive depth 0 (admission-control drop)
  kMandatoryEnforced,  // every job runs at least its mandatory depth
};

std::string_view to_string(DropMode mode);
/// Accepts "allow" and "mandatory".
DropMode parse_drop_mode(std::string_view name);

/// Raised when the mandatory parts of the current job set cannot all meet
/// their deadlines.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Either a fixed reward quantum or an epsilon from which the quantum is
/// derived against the current job set.
struct QuantConfig {
  enum class Kind { kDelta, kEpsilon };
  Kind kind = Kind::kDelta;
  double value = 0.1;

  static QuantConfig fixed(double delta);
  static QuantConfig from_epsilon(double epsilon);
};

struct PlanTask {
  JobId id = 0;
  double deadline = 0.0;         // adjusted, absolute
  std::vector<double> cum_exec;  // size L + 1, cum_exec[0] == 0
  int mandatory = 1;
  int done = 0;                  // stages completed or already dispatched
  std::vector<double> gain;      // size L + 1; meaningful for l >= done

  int num_stages() const { return static_cast<int>(cum_exec.size()) - 1; }
  double exec(int from, int to) const {
    return cum_exec[static_cast<std::size_t>(to)] -
           cum_exec[static_cast<std::size_t>(from)];
  }
  /// Smallest depth > done the job may be extended to.
  int first_option() const { return done + 1 > mandatory ? done + 1 : mandatory; }
  bool may_stop(DropMode mode) const {
    return mode == DropMode::kAllowed || done >= mandatory;
  }
};

/// Builds the planner view of a job. The secured reward is 0 when nothing has
/// run and curve.at(done) otherwise; gains are clamped at 0.
PlanTask make_plan_task(const AdjustedJob& job, int done,
                        const RewardCurve& curve);

/// Convenience for fresh jobs: `rewards[l - 1]` is the reward of depth l.
PlanTask make_plan_task(JobId id, double deadline,
                        std::span<const double> wcet,
                        std::span<const double> rewards, int mandatory = 1);

/// floor(reward / delta), robust to representation error when the reward is
/// an exact multiple of delta.
int quantize(double reward, double delta);

double choose_delta(double epsilon, double max_reward, std::size_t num_tasks);
/// Uses R = the largest gain any single task can reach on its own by its
/// deadline when the accelerator frees up at `now`.
double choose_delta(double epsilon, std::span<const PlanTask> tasks,
                    double now);
double resolve_delta(const QuantConfig& quant, std::span<const PlanTask> tasks,
                     double now);

struct DpTable {
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  static constexpr int kNoChoice = -1;

  struct Row {
    int width = 0;            // largest reachable quantized reward
    std::vector<double> time; // P(i, r), kInf when unreachable
    std::vector<int> depth;   // S(i, r): chosen depth, kNoChoice when none
    std::vector<int> prev;    // back-pointer column into the previous row

    bool operator==(const Row&) const = default;
  };

  double delta = 0.1;
  double now = 0.0;
  DropMode mode = DropMode::kAllowed;
  std::vector<Row> rows;

  std::size_t size() const { return rows.size(); }
  double time_at(std::size_t rank, int column) const;
};

/// Recomputes rows [start_rank, tasks.size()) of `table`; rows below
/// start_rank are kept as they are. `tasks` must be sorted by deadline.
/// Returns the number of cell/option evaluations performed.
std::uint64_t build_table(std::span<const PlanTask> tasks, double delta,
                          double now, DropMode mode, DpTable& table,
                          std::size_t start_rank);
DpTable build_table(std::span<const PlanTask> tasks, double delta, double now,
                    DropMode mode);

struct DepthPlan {
  std::vector<JobId> ids;  // rank order
  std::vector<int> depth;  // target depth per rank; == done means stop
  long quantized_reward = 0;
  double predicted_reward = 0.0;
};

/// Backtracks from the largest reachable reward in the last row.
DepthPlan extract_plan(const DpTable& table, std::span<const PlanTask> tasks);

/// Recomputes quantized/predicted totals of `plan` from the task gains.
void score_plan(DepthPlan& plan, std::span<const PlanTask> tasks, double delta);

/// Runs the plan in rank order from `now`; true when every job that executes
/// at least one new stage finishes by its deadline.
bool plan_is_feasible(std::span<const int> depth,
                      std::span<const PlanTask> tasks, double now);

struct ReassignResult {
  DepthPlan plan;
  bool changed = false;
  std::size_t extended_rank = 0;   // valid when changed
  std::uint64_t candidates = 0;    // extensions examined
};

/// Greedy repair after the job at rank `current` finished a stage and its
/// curve was re-predicted. `tasks[current]` must already reflect the new
/// curve and the new `done`. If the prediction did not drop for any of the
/// job's remaining planned depths the plan is kept. Otherwise the single
/// extension of another job that fits in the time the current job would
/// release, keeps the plan EDF-feasible and gains the most reward replaces the
/// current job's remaining stages, provided it gains strictly more than those
/// stages are now predicted to.
ReassignResult greedy_reassign(const DepthPlan& plan,
                               std::span<const PlanTask> tasks,
                               std::size_t current,
                               const RewardCurve& old_curve,
                               const RewardCurve& new_curve, double now,
                               double delta);

/// Incremental planner state: the deadline-ordered task set, its table and
/// the current plan. Rows are rebuilt lazily from the first stale rank.
class Planner {
 public:
  Planner(QuantConfig quant, DropMode mode);

  /// Inserts a job and re-plans. Only rows from the job's rank on (or from
  /// an earlier stale rank) are recomputed.
  void add_task(PlanTask task, double now);
  /// Replaces the task with the same id; its row becomes stale.
  void update_task(PlanTask task);
  void remove_task(JobId id);
  /// Rebuilds stale rows and extracts a fresh plan.
  void replan(double now);
  ReassignResult reassign_after_stage(PlanTask updated,
                                      const RewardCurve& old_curve,
                                      const RewardCurve& new_curve,
                                      double now);

  bool contains(JobId id) const;
  /// Planned depth for `id`; std::out_of_range when unknown.
  int target(JobId id) const;
  void set_target(JobId id, int depth);

  std::span<const PlanTask> tasks() const { return tasks_; }
  const DpTable& table() const { return table_; }
  const DepthPlan& plan() const { return plan_; }
  DropMode mode() const { return mode_; }
  double delta() const { return table_.delta; }

  std::size_t rows_rebuilt_last() const { return rows_rebuilt_last_; }
  std::uint64_t work_last() const { return work_last_; }

 private:
  std::size_t rank_of(JobId id) const;

  QuantConfig quant_;
  DropMode mode_;
  std::vector<PlanTask> tasks_;
  DpTable table_;
  DepthPlan plan_;
  std::size_t valid_rows_ = 0;
  bool has_table_ = false;
  std::size_t rows_rebuilt_last_ = 0;
  std::uint64_t work_last_ = 0;
};

}  // namespace anytime

#endif  // ANYTIME_DEPTH_PLANNER_HPP_
