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

#include "anytime/depth_planner.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace anytime {

namespace {

// Relative slack for quantization: 0.3 / 0.1 evaluates to 2.9999999999999996.
constexpr double kQuantEps = 1e-9;

bool by_deadline(const PlanTask& a, const PlanTask& b) {
  if (a.deadline != b.deadline) return a.deadline < b.deadline;
  return a.id < b.id;
}

}  // namespace

std::string_view to_string(DropMode mode) {
  return mode == DropMode::kAllowed ? "allow" : "mandatory";
}

DropMode parse_drop_mode(std::string_view name) {
  if (name == "allow") return DropMode::kAllowed;
  if (name == "mandatory") return DropMode::kMandatoryEnforced;
  throw std::invalid_argument("unknown drop mode '" + std::string(name) + "'");
}

QuantConfig QuantConfig::fixed(double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  return {Kind::kDelta, delta};
}

QuantConfig QuantConfig::from_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  return {Kind::kEpsilon, epsilon};
}

PlanTask make_plan_task(const AdjustedJob& job, int done,
                        const RewardCurve& curve) {
  const int last = job.num_stages();
  if (done < 0 || done > last) throw std::out_of_range("done outside [0, L]");
  PlanTask t;
  t.id = job.job.id;
  t.deadline = job.d_adj;
  t.cum_exec = job.cum_exec;
  t.mandatory = job.job.mandatory;
  t.done = done;
  t.gain.assign(static_cast<std::size_t>(last) + 1, 0.0);
  const double secured = done == 0 ? 0.0 : curve.at(done);
  for (int l = done + 1; l <= last; ++l) {
    t.gain[static_cast<std::size_t>(l)] = std::max(0.0, curve.at(l) - secured);
  }
  return t;
}

PlanTask make_plan_task(JobId id, double deadline, std::span<const double> wcet,
                        std::span<const double> rewards, int mandatory) {
  if (wcet.empty() || wcet.size() != rewards.size()) {
    throw std::invalid_argument("wcet and rewards must be non-empty and match");
  }
  PlanTask t;
  t.id = id;
  t.deadline = deadline;
  t.mandatory = mandatory;
  t.cum_exec.push_back(0.0);
  t.gain.push_back(0.0);
  for (std::size_t l = 0; l < wcet.size(); ++l) {
    t.cum_exec.push_back(t.cum_exec.back() + wcet[l]);
    t.gain.push_back(std::max(0.0, rewards[l]));
  }
  return t;
}

int quantize(double reward, double delta) {
  return static_cast<int>(std::floor(reward / delta + kQuantEps));
}

double choose_delta(double epsilon, double max_reward, std::size_t num_tasks) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  if (num_tasks == 0) throw std::invalid_argument("need at least one task");
  // Any positive quantum is exact when nothing can earn reward.
  const double r = max_reward > 0.0 ? max_reward : 1.0;
  return epsilon * r / static_cast<double>(num_tasks);
}

double choose_delta(double epsilon, std::span<const PlanTask> tasks,
                    double now) {
  double best = 0.0;
  for (const PlanTask& t : tasks) {
    for (int l = t.first_option(); l <= t.num_stages(); ++l) {
      if (now + t.exec(t.done, l) <= t.deadline + kTimeEps) {
        best = std::max(best, t.gain[static_cast<std::size_t>(l)]);
      }
    }
  }
  return choose_delta(epsilon, best, tasks.size());
}

double resolve_delta(const QuantConfig& quant, std::span<const PlanTask> tasks,
                     double now) {
  if (quant.kind == QuantConfig::Kind::kDelta || tasks.empty()) {
    return quant.kind == QuantConfig::Kind::kDelta ? quant.value : 1.0;
  }
  return choose_delta(quant.value, tasks, now);
}

double DpTable::time_at(std::size_t rank, int column) const {
  const Row& row = rows.at(rank);
  if (column < 0 || column > row.width) return kInf;
  return row.time[static_cast<std::size_t>(column)];
}

std::uint64_t build_table(std::span<const PlanTask> tasks, double delta,
                          double now, DropMode mode, DpTable& table,
                          std::size_t start_rank) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  if (start_rank > 0 && start_rank <= tasks.size() &&
      (table.delta != delta || table.now != now || table.mode != mode ||
       table.rows.size() < start_rank)) {
    throw std::logic_error(
        "partial rebuild requires the table's delta, clock and drop mode");
  }
  table.delta = delta;
  table.now = now;
  table.mode = mode;
  table.rows.resize(tasks.size());

  const DpTable::Row base{0, {0.0}, {DpTable::kNoChoice}, {DpTable::kNoChoice}};
  std::uint64_t work = 0;
  std::vector<int> q;
  for (std::size_t i = start_rank; i < tasks.size(); ++i) {
    const PlanTask& task = tasks[i];
    const DpTable::Row& prev = i == 0 ? base : table.rows[i - 1];
    const int first = task.first_option();
    const int last = task.num_stages();
    const bool may_stop = task.may_stop(mode);

    q.assign(static_cast<std::size_t>(last) + 1, 0);
    int max_q = 0;
    for (int l = first; l <= last; ++l) {
      q[static_cast<std::size_t>(l)] =
          quantize(task.gain[static_cast<std::size_t>(l)], delta);
      max_q = std::max(max_q, q[static_cast<std::size_t>(l)]);
    }

    DpTable::Row row;
    row.width = prev.width + max_q;
    const auto cols = static_cast<std::size_t>(row.width) + 1;
    row.time.assign(cols, DpTable::kInf);
    row.depth.assign(cols, DpTable::kNoChoice);
    row.prev.assign(cols, DpTable::kNoChoice);

    for (int r = 0; r <= row.width; ++r) {
      const auto rc = static_cast<std::size_t>(r);
      double best = DpTable::kInf;
      if (may_stop && r <= prev.width) {
        const double t = prev.time[rc];
        if (t < best) {
          best = t;
          row.depth[rc] = task.done;
          row.prev[rc] = r;
        }
      }
      for (int l = first; l <= last; ++l) {
        const int base_col = r - q[static_cast<std::size_t>(l)];
        if (base_col < 0 || base_col > prev.width) continue;
        const double before = prev.time[static_cast<std::size_t>(base_col)];
        if (before == DpTable::kInf) continue;
        const double t = before + task.exec(task.done, l);
        if (now + t > task.deadline + kTimeEps) continue;
        // Strict: ties keep the shallower choice.
        if (t < best) {
          best = t;
          row.depth[rc] = l;
          row.prev[rc] = base_col;
        }
      }
      row.time[rc] = best;
      work += static_cast<std::uint64_t>(1 + std::max(0, last - first + 1));
    }
    table.rows[i] = std::move(row);
  }
  return work;
}

DpTable build_table(std::span<const PlanTask> tasks, double delta, double now,
                    DropMode mode) {
  DpTable table;
  build_table(tasks, delta, now, mode, table, 0);
  return table;
}

void score_plan(DepthPlan& plan, std::span<const PlanTask> tasks,
                double delta) {
  plan.quantized_reward = 0;
  plan.predicted_reward = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double g = tasks[i].gain[static_cast<std::size_t>(plan.depth[i])];
    plan.predicted_reward += g;
    if (plan.depth[i] > tasks[i].done) {
      plan.quantized_reward += quantize(g, delta);
    }
  }
}

DepthPlan extract_plan(const DpTable& table, std::span<const PlanTask> tasks) {
  if (tasks.size() != table.size()) {
    throw std::invalid_argument("table and task list differ in length");
  }
  DepthPlan plan;
  if (tasks.empty()) return plan;

  const DpTable::Row& last = table.rows.back();
  int column = last.width;
  while (column >= 0 &&
         last.time[static_cast<std::size_t>(column)] == DpTable::kInf) {
    --column;
  }
  if (column < 0) {
    throw InfeasibleError("mandatory parts of " +
                          std::to_string(tasks.size()) +
                          " jobs cannot all meet their deadlines");
  }

  plan.ids.resize(tasks.size());
  plan.depth.resize(tasks.size());
  plan.quantized_reward = column;
  for (std::size_t i = tasks.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(column);
    plan.ids[i] = tasks[i].id;
    plan.depth[i] = table.rows[i].depth[c];
    column = table.rows[i].prev[c];
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    plan.predicted_reward +=
        tasks[i].gain[static_cast<std::size_t>(plan.depth[i])];
  }
  return plan;
}

bool plan_is_feasible(std::span<const int> depth,
                      std::span<const PlanTask> tasks, double now) {
  double t = now;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (depth[i] <= tasks[i].done) continue;
    t += tasks[i].exec(tasks[i].done, depth[i]);
    if (t > tasks[i].deadline + kTimeEps) return false;
  }
  return true;
}

ReassignResult greedy_reassign(const DepthPlan& plan,
                               std::span<const PlanTask> tasks,
                               std::size_t current,
                               const RewardCurve& old_curve,
                               const RewardCurve& new_curve, double now,
                               double delta) {
  ReassignResult out;
  out.plan = plan;
  score_plan(out.plan, tasks, delta);

  const PlanTask& cur = tasks[current];
  const int target = plan.depth[current];
  if (target <= cur.done) return out;

  bool dropped = false;
  for (int l = cur.done + 1; l <= target; ++l) {
    if (new_curve.at(l) < old_curve.at(l)) {
      dropped = true;
      break;
    }
  }
  if (!dropped) return out;

  // Never cut into the mandatory part.
  const int keep = std::max(cur.done, std::min(cur.mandatory, target));
  if (keep >= target) return out;
  const double budget = cur.exec(keep, target);
  const double loss = cur.gain[static_cast<std::size_t>(target)] -
                      cur.gain[static_cast<std::size_t>(keep)];

  std::vector<int> trial = plan.depth;
  trial[current] = keep;
  double best_gain = 0.0;
  std::size_t best_rank = 0;
  int best_depth = -1;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (i == current) continue;
    const PlanTask& t = tasks[i];
    const int from = std::max(plan.depth[i], t.done);
    const int lo = std::max(from + 1, t.mandatory);
    for (int l = lo; l <= t.num_stages(); ++l) {
      if (t.exec(from, l) > budget + kTimeEps) break;
      ++out.candidates;
      const double g = t.gain[static_cast<std::size_t>(l)] -
                       t.gain[static_cast<std::size_t>(from)];
      if (best_depth >= 0 && g <= best_gain) continue;
      trial[i] = l;
      const bool ok = plan_is_feasible(trial, tasks, now);
      trial[i] = plan.depth[i];
      if (!ok) continue;
      best_gain = g;
      best_rank = i;
      best_depth = l;
    }
  }

  if (best_depth >= 0 && best_gain > loss) {
    out.plan.depth[current] = keep;
    out.plan.depth[best_rank] = best_depth;
    score_plan(out.plan, tasks, delta);
    out.changed = true;
    out.extended_rank = best_rank;
  }
  return out;
}

Planner::Planner(QuantConfig quant, DropMode mode)
    : quant_(quant), mode_(mode) {}

std::size_t Planner::rank_of(JobId id) const {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].id == id) return i;
  }
  throw std::out_of_range("planner has no job " + std::to_string(id));
}

bool Planner::contains(JobId id) const {
  return std::any_of(tasks_.begin(), tasks_.end(),
                     [id](const PlanTask& t) { return t.id == id; });
}

void Planner::add_task(PlanTask task, double now) {
  if (contains(task.id)) {
    throw std::invalid_argument("job " + std::to_string(task.id) +
                                " already planned");
  }
  auto pos = std::upper_bound(tasks_.begin(), tasks_.end(), task, by_deadline);
  const auto rank = static_cast<std::size_t>(pos - tasks_.begin());
  tasks_.insert(pos, std::move(task));
  if (has_table_) {
    table_.rows.insert(table_.rows.begin() +
                           static_cast<std::ptrdiff_t>(std::min(
                               rank, table_.rows.size())),
                       DpTable::Row{});
  }
  plan_.ids.insert(plan_.ids.begin() + static_cast<std::ptrdiff_t>(rank),
                   tasks_[rank].id);
  plan_.depth.insert(plan_.depth.begin() + static_cast<std::ptrdiff_t>(rank),
                     tasks_[rank].done);
  valid_rows_ = std::min(valid_rows_, rank);
  replan(now);
}

void Planner::update_task(PlanTask task) {
  const std::size_t rank = rank_of(task.id);
  if (task.deadline != tasks_[rank].deadline) {
    throw std::invalid_argument("a job's deadline cannot change");
  }
  tasks_[rank] = std::move(task);
  valid_rows_ = std::min(valid_rows_, rank);
}

void Planner::remove_task(JobId id) {
  const std::size_t rank = rank_of(id);
  tasks_.erase(tasks_.begin() + static_cast<std::ptrdiff_t>(rank));
  if (rank < table_.rows.size()) {
    table_.rows.erase(table_.rows.begin() + static_cast<std::ptrdiff_t>(rank));
  }
  plan_.ids.erase(plan_.ids.begin() + static_cast<std::ptrdiff_t>(rank));
  plan_.depth.erase(plan_.depth.begin() + static_cast<std::ptrdiff_t>(rank));
  valid_rows_ = std::min(valid_rows_, rank);
}

void Planner::replan(double now) {
  const double delta = resolve_delta(quant_, tasks_, now);
  if (!has_table_ || table_.now != now || table_.delta != delta) {
    valid_rows_ = 0;
  }
  rows_rebuilt_last_ = tasks_.size() - std::min(valid_rows_, tasks_.size());
  if (valid_rows_ == 0) {
    table_.rows.clear();
    table_.delta = delta;
    table_.now = now;
    table_.mode = mode_;
  }
  work_last_ = build_table(tasks_, delta, now, mode_, table_, valid_rows_);
  has_table_ = true;
  valid_rows_ = tasks_.size();
  plan_ = extract_plan(table_, tasks_);
}

ReassignResult Planner::reassign_after_stage(PlanTask updated,
                                             const RewardCurve& old_curve,
                                             const RewardCurve& new_curve,
                                             double now) {
  const std::size_t rank = rank_of(updated.id);
  update_task(std::move(updated));
  // A committed stage may have overtaken a stale target.
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    plan_.depth[i] = std::max(plan_.depth[i], tasks_[i].done);
  }
  ReassignResult result = greedy_reassign(plan_, tasks_, rank, old_curve,
                                          new_curve, now, table_.delta);
  plan_ = result.plan;
  work_last_ = result.candidates * tasks_.size();
  return result;
}

int Planner::target(JobId id) const { return plan_.depth[rank_of(id)]; }

void Planner::set_target(JobId id, int depth) {
  const std::size_t rank = rank_of(id);
  if (depth < tasks_[rank].done || depth > tasks_[rank].num_stages()) {
    throw std::out_of_range("target depth outside [done, L]");
  }
  plan_.depth[rank] = depth;
  score_plan(plan_, tasks_, table_.delta);
}

}  // namespace anytime
