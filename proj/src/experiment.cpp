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

#include "anytime/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "anytime/format.hpp"
#include "anytime/oracle.hpp"

namespace anytime {

Policy make_policy(std::string_view name, const QuantConfig& quant,
                   DropMode drop) {
  Policy p = parse_policy(name);
  if (auto* planner = std::get_if<PlannerPolicy>(&p)) {
    planner->quant = quant;
    planner->drop = drop;
  }
  return p;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kClients:
      return "k";
    case SweepAxis::kDUpper:
      return "du";
    case SweepAxis::kDLower:
      return "dl";
    case SweepAxis::kDelta:
      return "delta";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "k") return SweepAxis::kClients;
  if (name == "du") return SweepAxis::kDUpper;
  if (name == "dl") return SweepAxis::kDLower;
  if (name == "delta") return SweepAxis::kDelta;
  throw std::invalid_argument("unknown sweep axis '" + std::string(name) + "'");
}

void validate(const ExperimentPlan& plan) {
  if (plan.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (plan.policies.empty()) throw std::invalid_argument("sweep needs at least one policy");
  if (plan.replications < 1) throw std::invalid_argument("replications must be >= 1");
  for (const std::string& p : plan.policies) (void)parse_policy(p);
  for (double v : plan.values) {
    if (plan.axis == SweepAxis::kClients && (v < 1 || v != std::floor(v))) {
      throw std::invalid_argument("K values must be positive integers");
    }
    if (!(v > 0.0)) throw std::invalid_argument("sweep values must be positive");
  }
}

MeanSd mean_sd(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

std::vector<SweepRow> run_experiment(const ExperimentPlan& plan,
                                     const TraceLibrary& library,
                                     unsigned threads) {
  validate(plan);
  validate(library);
  const std::size_t n_values = plan.values.size();
  const std::size_t n_policies = plan.policies.size();
  const auto n_reps = static_cast<std::size_t>(plan.replications);
  const std::size_t total = n_values * n_policies * n_reps;
  std::vector<SimReport> reports(total);

  auto run_one = [&](std::size_t index) {
    const std::size_t rep = index % n_reps;
    const std::size_t pol = (index / n_reps) % n_policies;
    const std::size_t val = index / (n_reps * n_policies);
    const double v = plan.values[val];

    WorkloadSpec spec = plan.workload;
    spec.seed = plan.seed_base + rep;
    QuantConfig quant = plan.quant;
    switch (plan.axis) {
      case SweepAxis::kClients:
        spec.clients = static_cast<int>(v);
        break;
      case SweepAxis::kDUpper:
        spec.d_upper = v;
        break;
      case SweepAxis::kDLower:
        spec.d_lower = v;
        break;
      case SweepAxis::kDelta:
        quant = QuantConfig::fixed(v);
        break;
    }
    SimConfig sim = plan.sim;
    sim.seed = plan.seed_base + rep;
    const Workload w = generate(spec, library);
    reports[index] = run(w, make_policy(plan.policies[pol], quant, plan.drop), sim);
  };

  threads = std::max(1u, threads);
  if (threads == 1 || total <= 1) {
    for (std::size_t i = 0; i < total; ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, total); ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) {
          try {
            run_one(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<SweepRow> rows;
  rows.reserve(n_values * n_policies);
  for (std::size_t val = 0; val < n_values; ++val) {
    for (std::size_t pol = 0; pol < n_policies; ++pol) {
      std::vector<double> acc, miss, depth, overhead;
      for (std::size_t rep = 0; rep < n_reps; ++rep) {
        const SimReport& r = reports[(val * n_policies + pol) * n_reps + rep];
        acc.push_back(r.accuracy);
        miss.push_back(r.miss_rate);
        depth.push_back(r.mean_depth);
        overhead.push_back(r.scheduler_overhead_fraction);
      }
      SweepRow row;
      row.axis = std::string(to_string(plan.axis));
      row.value = plan.values[val];
      row.policy = plan.policies[pol];
      row.replications = plan.replications;
      const MeanSd a = mean_sd(acc), m = mean_sd(miss);
      row.accuracy_mean = a.mean;
      row.accuracy_sd = a.sd;
      row.miss_rate_mean = m.mean;
      row.miss_rate_sd = m.sd;
      row.mean_depth = mean_sd(depth).mean;
      row.overhead_fraction = mean_sd(overhead).mean;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_simulate_csv(std::ostream& out, const std::vector<SimulateRun>& runs) {
  out << "policy,clients,d_lower,d_upper,delta,seed,jobs,accuracy,"
         "accuracy_non_missed,miss_rate,mean_depth,scheduler_overhead_fraction\n";
  for (const SimulateRun& r : runs) {
    out << r.policy << ',' << r.workload.clients << ','
        << format_double(r.workload.d_lower) << ','
        << format_double(r.workload.d_upper) << ',' << format_double(r.delta)
        << ',' << r.workload.seed << ',' << r.report.jobs << ','
        << format_double(r.report.accuracy) << ','
        << format_double(r.report.accuracy_non_missed) << ','
        << format_double(r.report.miss_rate) << ','
        << format_double(r.report.mean_depth) << ','
        << format_double(r.report.scheduler_overhead_fraction) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "axis,value,policy,replications,accuracy_mean,accuracy_sd,"
         "miss_rate_mean,miss_rate_sd,mean_depth,scheduler_overhead_fraction\n";
  for (const SweepRow& r : rows) {
    out << r.axis << ',' << format_double(r.value) << ',' << r.policy << ','
        << r.replications << ',' << format_double(r.accuracy_mean) << ','
        << format_double(r.accuracy_sd) << ','
        << format_double(r.miss_rate_mean) << ','
        << format_double(r.miss_rate_sd) << ',' << format_double(r.mean_depth)
        << ',' << format_double(r.overhead_fraction) << '\n';
  }
}

void write_jobs_csv(std::ostream& out, const SimReport& report) {
  out << "id,client,arrival,raw_deadline,adjusted_deadline,retired_at,"
         "depth_executed,missed,final_correct,final_confidence\n";
  for (const JobOutcome& o : report.outcomes) {
    out << o.id << ',' << o.client << ',' << format_double(o.arrival) << ','
        << format_double(o.raw_deadline) << ','
        << format_double(o.adjusted_deadline) << ','
        << format_double(o.retired_at) << ',' << o.depth_executed << ','
        << (o.missed ? 1 : 0) << ',' << (o.final_correct ? 1 : 0) << ','
        << format_double(o.final_confidence) << '\n';
  }
}

FptasSummary validate_fptas(const FptasOptions& options) {
  if (options.max_tasks < 1 || options.max_stages < 1) {
    throw std::invalid_argument("instance size limits must be positive");
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<int> n_dist(1, options.max_tasks);
  std::uniform_int_distribution<int> l_dist(1, options.max_stages);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  FptasSummary summary;
  for (std::size_t k = 0; k < options.instances; ++k) {
    const int n = n_dist(rng);
    std::vector<PlanTask> tasks;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const int stages = l_dist(rng);
      std::vector<double> wcet(static_cast<std::size_t>(stages));
      std::vector<double> reward(static_cast<std::size_t>(stages));
      for (auto& w : wcet) {
        w = 0.5 + unit(rng);
        total += w;
      }
      for (auto& r : reward) r = unit(rng);
      std::sort(reward.begin(), reward.end());
      tasks.push_back(make_plan_task(static_cast<JobId>(i), 0.0, wcet, reward));
    }
    for (PlanTask& t : tasks) t.deadline = (0.2 + 0.8 * unit(rng)) * total;
    std::sort(tasks.begin(), tasks.end(), [](const PlanTask& a, const PlanTask& b) {
      return std::tie(a.deadline, a.id) < std::tie(b.deadline, b.id);
    });

    const OracleResult opt = brute_force(tasks, 0.0, DropMode::kAllowed);
    for (double eps : options.epsilons) {
      const double delta = choose_delta(eps, tasks, 0.0);
      const DpTable table = build_table(tasks, delta, 0.0, DropMode::kAllowed);
      const DepthPlan plan = extract_plan(table, tasks);
      ++summary.checked;
      if (plan.predicted_reward < (1.0 - eps) * opt.reward - 1e-12) {
        ++summary.bound_violations;
      }
      if (!plan_is_feasible(plan.depth, tasks, 0.0)) ++summary.infeasible_plans;
      if (opt.reward > 0.0) {
        summary.worst_ratio =
            std::min(summary.worst_ratio, plan.predicted_reward / opt.reward);
      }
    }
  }
  return summary;
}

}  // namespace anytime
