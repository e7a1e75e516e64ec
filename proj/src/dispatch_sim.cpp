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

#include "anytime/dispatch_sim.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <stdexcept>
#include <tuple>

namespace anytime {

Policy parse_policy(std::string_view name) {
  if (name == "edf") return EdfPolicy{};
  if (name == "lcf") return LcfPolicy{};
  if (name == "rr") return RrPolicy{};
  constexpr std::string_view kPrefix = "planner-";
  if (name.starts_with(kPrefix)) {
    PlannerPolicy p;
    p.model = parse_utility_model(name.substr(kPrefix.size()));
    return p;
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

std::string policy_name(const Policy& policy) {
  struct Namer {
    std::string operator()(const PlannerPolicy& p) const {
      return "planner-" + std::string(to_string(p.model));
    }
    std::string operator()(const EdfPolicy&) const { return "edf"; }
    std::string operator()(const LcfPolicy&) const { return "lcf"; }
    std::string operator()(const RrPolicy&) const { return "rr"; }
  };
  return std::visit(Namer{}, policy);
}

std::string_view to_string(CostMode mode) {
  switch (mode) {
    case CostMode::kNone:
      return "none";
    case CostMode::kModeled:
      return "modeled";
    case CostMode::kMeasured:
      return "measured";
  }
  return "?";
}

CostMode parse_cost_mode(std::string_view name) {
  if (name == "none") return CostMode::kNone;
  if (name == "modeled") return CostMode::kModeled;
  if (name == "measured") return CostMode::kMeasured;
  throw std::invalid_argument("unknown cost mode '" + std::string(name) + "'");
}

std::optional<JobId> pick_next(const Policy& policy,
                               std::span<const ReadyJob> ready, double now,
                               std::optional<std::uint64_t> last_served) {
  const ReadyJob* best = nullptr;
  auto eligible = [now](const ReadyJob& j) {
    return j.target > j.done && now < j.raw_deadline;
  };
  auto edf_less = [](const ReadyJob& a, const ReadyJob& b) {
    return std::tie(a.deadline, a.id) < std::tie(b.deadline, b.id);
  };

  if (std::holds_alternative<RrPolicy>(policy)) {
    const ReadyJob* wrap = nullptr;
    for (const ReadyJob& j : ready) {
      if (!eligible(j)) continue;
      if (!wrap || j.seq < wrap->seq) wrap = &j;
      if (last_served && j.seq > *last_served &&
          (!best || j.seq < best->seq)) {
        best = &j;
      }
    }
    if (!best) best = wrap;
  } else if (std::holds_alternative<LcfPolicy>(policy)) {
    for (const ReadyJob& j : ready) {
      if (!eligible(j)) continue;
      if (!best || std::tie(j.confidence, j.deadline, j.id) <
                       std::tie(best->confidence, best->deadline, best->id)) {
        best = &j;
      }
    }
  } else {
    // EDF and the planner both dispatch in deadline order; the planner's
    // targets already encode which jobs run and how deep.
    for (const ReadyJob& j : ready) {
      if (!eligible(j)) continue;
      if (!best || edf_less(j, *best)) best = &j;
    }
  }
  if (!best) return std::nullopt;
  return best->id;
}

namespace {

enum class EventKind : int { kArrival = 0, kStageComplete = 1, kDeadline = 2 };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kArrival;
  JobId id = 0;
  std::size_t request = 0;
};

struct EventLater {
  bool operator()(const Event& a, const Event& b) const {
    return std::tie(a.time, a.kind, a.id) > std::tie(b.time, b.kind, b.id);
  }
};

struct ActiveJob {
  AdjustedJob adj;
  int client = 0;
  std::uint64_t seq = 0;
  int done = 0;
  bool running = false;
  double confidence = -1.0;
  int depth_ok = 0;
  bool late = false;
  RewardCurve curve;
  std::vector<double> trace;
};

using Clock = std::chrono::steady_clock;

class Simulation {
 public:
  Simulation(const Workload& workload, const Policy& policy,
             const SimConfig& config)
      : workload_(workload),
        policy_(policy),
        config_(config),
        rng_(config.seed) {
    if (const auto* p = std::get_if<PlannerPolicy>(&policy_)) {
      planner_policy_ = *p;
      planner_.emplace(p->quant, p->drop);
    }
    if (config_.jitter < 0.0 || config_.jitter >= 1.0) {
      throw std::invalid_argument("jitter must lie in [0, 1)");
    }
  }

  SimReport run() {
    if (workload_.mode == ArrivalMode::kClosedLoop) {
      for (std::size_t r = 0; r < workload_.requests.size(); ++r) {
        const int c = workload_.requests[r].client;
        if (c < 0) throw std::invalid_argument("negative client id");
        if (static_cast<std::size_t>(c) >= pending_.size()) {
          pending_.resize(static_cast<std::size_t>(c) + 1);
        }
        pending_[static_cast<std::size_t>(c)].push_back(r);
      }
      for (auto& q : pending_) {
        if (q.empty()) continue;
        const std::size_t r = q.front();
        q.pop_front();
        push_arrival(r, workload_.requests[r].job.arrival);
      }
    } else {
      double prev = -std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < workload_.requests.size(); ++r) {
        const double at = workload_.requests[r].job.arrival;
        if (at < prev) throw std::invalid_argument("workload not arrival-sorted");
        prev = at;
        push_arrival(r, at);
      }
    }

    while (!events_.empty()) {
      const double now = events_.top().time;
      while (!events_.empty() && events_.top().time == now) {
        const Event e = events_.top();
        events_.pop();
        switch (e.kind) {
          case EventKind::kArrival:
            on_arrival(e.request, now);
            break;
          case EventKind::kStageComplete:
            on_stage_complete(e.id, now);
            break;
          case EventKind::kDeadline:
            on_deadline(e.id, now);
            break;
        }
      }
      dispatch(now);
      report_.makespan = std::max(report_.makespan, now);
    }
    return finish();
  }

 private:
  bool is_planner() const { return planner_.has_value(); }

  void push_arrival(std::size_t request, double at) {
    events_.push({at, EventKind::kArrival, workload_.requests[request].job.id,
                  request});
  }

  // Earliest instant the accelerator can start new work, as the planner
  // sees it.
  double plan_clock(double now) const {
    double t = std::max(now, cpu_free_at_);
    if (gpu_busy_) t = std::max(t, gpu_free_at_);
    return t;
  }

  void charge(double now, std::uint64_t work, Clock::time_point started) {
    double cost = 0.0;
    switch (config_.cost.mode) {
      case CostMode::kNone:
        return;
      case CostMode::kModeled:
        cost = config_.cost.per_invocation +
               config_.cost.per_unit * static_cast<double>(work);
        break;
      case CostMode::kMeasured:
        cost = std::chrono::duration<double>(Clock::now() - started).count();
        break;
    }
    cpu_free_at_ = std::max(cpu_free_at_, now) + cost;
    report_.scheduler_time += cost;
  }

  void on_arrival(std::size_t request, double now) {
    const auto started = Clock::now();
    Job job = workload_.requests[request].job;
    job.arrival = now;
    ActiveJob a;
    a.adj = adjust_deadline(job, config_.cpu_overhead);
    a.client = workload_.requests[request].client;
    a.seq = next_seq_++;
    if (is_planner() && planner_policy_.model == UtilityModel::kOracle) {
      for (const StageProfile& s : job.stages) a.trace.push_back(s.confidence);
    }
    const JobId id = job.id;
    if (!active_.emplace(id, std::move(a)).second) {
      throw std::invalid_argument("duplicate job id " + std::to_string(id));
    }
    events_.push({job.raw_deadline(), EventKind::kDeadline, id, request});

    std::uint64_t work = 0;
    if (is_planner()) {
      ActiveJob& j = active_.at(id);
      j.curve = predict(j, config_.prior, 0);
      try {
        planner_->add_task(make_plan_task(j.adj, 0, j.curve), plan_clock(now));
        work = planner_->work_last();
      } catch (const InfeasibleError&) {
        work = planner_->work_last() + shed_until_feasible(id, now);
      }
      ++report_.planner_invocations;
      report_.rows_rebuilt += planner_->rows_rebuilt_last();
      retire_exhausted(now);
    }
    charge(now, work, started);
  }

  RewardCurve predict(const ActiveJob& j, double observed, int depth) const {
    if (planner_policy_.model == UtilityModel::kOracle) {
      return predict_curve(UtilityModel::kOracle, observed, depth, j.adj,
                           std::span<const double>(j.trace));
    }
    return predict_curve(planner_policy_.model, observed, depth, j.adj);
  }

  // Mandatory parts no longer fit: turn away the newest request first, then
  // the latest-deadline jobs still short of their mandatory depth.
  std::uint64_t shed_until_feasible(JobId newcomer, double now) {
    std::uint64_t work = 0;
    JobId victim = newcomer;
    while (true) {
      retire(victim, now);
      try {
        planner_->replan(plan_clock(now));
        return work + planner_->work_last();
      } catch (const InfeasibleError&) {
        work += planner_->work_last();
      }
      const auto tasks = planner_->tasks();
      auto it = std::find_if(tasks.rbegin(), tasks.rend(),
                             [](const PlanTask& t) { return t.done < t.mandatory; });
      if (it == tasks.rend()) {
        throw std::logic_error("mandatory plan infeasible with nothing to shed");
      }
      victim = it->id;
    }
  }

  void on_stage_complete(JobId id, double now) {
    gpu_busy_ = false;
    auto it = active_.find(id);
    if (it == active_.end()) return;  // retired while its stage was running
    const auto started = Clock::now();
    ActiveJob& j = it->second;
    const StageProfile& stage = j.adj.job.stages[static_cast<std::size_t>(j.done)];
    j.running = false;
    ++j.done;
    j.confidence = stage.confidence;
    if (now <= j.adj.job.raw_deadline() + kTimeEps) {
      j.depth_ok = j.done;
    } else {
      j.late = true;
    }

    if (!is_planner()) {
      if (j.done == j.adj.num_stages()) retire(id, now);
      charge(now, 0, started);
      return;
    }

    if (now > j.adj.d_adj + kTimeEps) ++report_.adjusted_deadline_violations;
    if (j.done >= planner_->target(id) || j.done == j.adj.num_stages()) {
      retire(id, now);
      charge(now, 0, started);
      return;
    }
    RewardCurve old_curve = std::move(j.curve);
    j.curve = predict(j, stage.confidence, j.done);
    const ReassignResult r = planner_->reassign_after_stage(
        make_plan_task(j.adj, j.done, j.curve), old_curve, j.curve,
        plan_clock(now));
    if (r.changed) ++report_.reassignments;
    retire_exhausted(now);
    charge(now, planner_->work_last(), started);
  }

  void on_deadline(JobId id, double now) {
    if (active_.count(id)) retire(id, now);
  }

  // Planner bookkeeping after a plan change: jobs that reached their target
  // return their result; jobs that never ran and can no longer make their
  // first stage are given up.
  void retire_exhausted(double now) {
    std::vector<JobId> gone;
    const double clock = plan_clock(now);
    for (const PlanTask& t : planner_->tasks()) {
      const ActiveJob& j = active_.at(t.id);
      if (j.running || planner_->target(t.id) > j.done) continue;
      if (j.done > 0) {
        gone.push_back(t.id);
      } else if (clock + t.exec(0, t.first_option()) > t.deadline + kTimeEps) {
        gone.push_back(t.id);
      }
    }
    for (JobId id : gone) retire(id, now);
  }

  bool has_waiting_candidates(double now) const {
    const double clock = plan_clock(now);
    for (const PlanTask& t : planner_->tasks()) {
      if (t.done == 0 &&
          clock + t.exec(0, t.first_option()) <= t.deadline + kTimeEps) {
        return true;
      }
    }
    return false;
  }

  void dispatch(double now) {
    if (gpu_busy_) return;
    bool replanned = false;
    while (true) {
      const auto started = Clock::now();
      const double at = std::max(now, cpu_free_at_);
      ready_.clear();
      for (const auto& [id, j] : active_) {
        if (j.running) continue;
        ReadyJob r;
        r.id = id;
        r.seq = j.seq;
        r.deadline = j.adj.d_adj;
        r.raw_deadline = j.adj.job.raw_deadline();
        r.confidence = j.confidence;
        r.done = j.done;
        r.target = is_planner() ? planner_->target(id) : j.adj.num_stages();
        ready_.push_back(r);
      }
      const std::optional<JobId> pick = pick_next(policy_, ready_, at, last_served_);
      charge(now, ready_.size(), started);

      if (!pick) {
        if (is_planner() && !replanned && has_waiting_candidates(now)) {
          const auto t0 = Clock::now();
          planner_->replan(plan_clock(now));
          ++report_.planner_invocations;
          report_.rows_rebuilt += planner_->rows_rebuilt_last();
          const std::uint64_t work = planner_->work_last();
          retire_exhausted(now);
          charge(now, work, t0);
          replanned = true;
          continue;
        }
        return;
      }

      ActiveJob& j = active_.at(*pick);
      const StageProfile& stage = j.adj.job.stages[static_cast<std::size_t>(j.done)];
      const double start = std::max(now, cpu_free_at_);
      if (is_planner() && start + stage.wcet > j.adj.d_adj + kTimeEps) {
        // Scheduling delay ate the slack the plan relied on.
        planner_->set_target(*pick, j.done);
        retire_exhausted(now);
        continue;
      }
      double exec = stage.wcet;
      if (config_.jitter > 0.0) {
        exec *= 1.0 - config_.jitter * unit_(rng_);
      }
      j.running = true;
      gpu_busy_ = true;
      gpu_free_at_ = start + exec;
      report_.busy_time += exec;
      last_served_ = j.seq;
      events_.push({start + exec, EventKind::kStageComplete, *pick, 0});
      if (config_.record_stages) {
        report_.stages.push_back({*pick, j.done + 1, start, start + exec});
      }
      if (is_planner()) {
        planner_->update_task(make_plan_task(j.adj, j.done + 1, j.curve));
      }
      return;
    }
  }

  void retire(JobId id, double now) {
    auto it = active_.find(id);
    if (it == active_.end()) return;
    const ActiveJob& j = it->second;
    JobOutcome o;
    o.id = id;
    o.client = j.client;
    o.arrival = j.adj.job.arrival;
    o.raw_deadline = j.adj.job.raw_deadline();
    o.adjusted_deadline = j.adj.d_adj;
    o.retired_at = now;
    o.depth_executed = j.depth_ok;
    o.missed = j.depth_ok == 0;
    o.finished_by_deadline = !o.missed && !j.late;
    if (!o.missed) {
      const StageProfile& s = j.adj.job.stages[static_cast<std::size_t>(j.depth_ok - 1)];
      o.final_correct = s.correct;
      o.final_confidence = s.confidence;
    }
    outcomes_.push_back(o);

    const int client = j.client;
    active_.erase(it);
    if (planner_ && planner_->contains(id)) planner_->remove_task(id);

    if (workload_.mode == ArrivalMode::kClosedLoop) {
      auto& q = pending_[static_cast<std::size_t>(client)];
      if (!q.empty()) {
        const std::size_t r = q.front();
        q.pop_front();
        push_arrival(r, now);
      }
    }
  }

  SimReport finish() {
    std::sort(outcomes_.begin(), outcomes_.end(),
              [](const JobOutcome& a, const JobOutcome& b) { return a.id < b.id; });
    report_.policy = policy_name(policy_);
    report_.jobs = outcomes_.size();
    if (!outcomes_.empty()) {
      std::size_t correct = 0, missed = 0, depth = 0;
      for (const JobOutcome& o : outcomes_) {
        correct += o.final_correct ? 1 : 0;
        missed += o.missed ? 1 : 0;
        depth += static_cast<std::size_t>(o.depth_executed);
        report_.realized_confidence += o.final_confidence;
      }
      const double n = static_cast<double>(outcomes_.size());
      report_.accuracy = static_cast<double>(correct) / n;
      report_.miss_rate = static_cast<double>(missed) / n;
      report_.mean_depth = static_cast<double>(depth) / n;
      report_.accuracy_non_missed =
          missed == outcomes_.size()
              ? 0.0
              : static_cast<double>(correct) / (n - static_cast<double>(missed));
    }
    const double total = report_.scheduler_time + report_.busy_time;
    report_.scheduler_overhead_fraction =
        total > 0.0 ? report_.scheduler_time / total : 0.0;
    report_.outcomes = std::move(outcomes_);
    return std::move(report_);
  }

  const Workload& workload_;
  Policy policy_;
  SimConfig config_;
  PlannerPolicy planner_policy_;
  std::optional<Planner> planner_;

  std::priority_queue<Event, std::vector<Event>, EventLater> events_;
  std::map<JobId, ActiveJob> active_;
  std::vector<std::deque<std::size_t>> pending_;
  std::vector<ReadyJob> ready_;
  std::vector<JobOutcome> outcomes_;
  std::uint64_t next_seq_ = 0;
  std::optional<std::uint64_t> last_served_;

  bool gpu_busy_ = false;
  double gpu_free_at_ = 0.0;
  double cpu_free_at_ = 0.0;

  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  SimReport report_;
};

}  // namespace

SimReport run(const Workload& workload, const Policy& policy,
              const SimConfig& config) {
  return Simulation(workload, policy, config).run();
}

}  // namespace anytime
