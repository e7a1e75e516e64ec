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

#include "anytime/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace anytime {

OracleResult brute_force(std::span<const PlanTask> tasks, double now,
                         DropMode mode, std::uint64_t cap) {
  const std::size_t n = tasks.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (tasks[a].deadline != tasks[b].deadline) {
                       return tasks[a].deadline < tasks[b].deadline;
                     }
                     return tasks[a].id < tasks[b].id;
                   });

  // options[k]: candidate depths of the k-th task in deadline order.
  std::vector<std::vector<int>> options(n);
  std::uint64_t space = 1;
  for (std::size_t k = 0; k < n; ++k) {
    const PlanTask& t = tasks[order[k]];
    if (t.may_stop(mode)) options[k].push_back(t.done);
    for (int l = t.first_option(); l <= t.num_stages(); ++l) {
      options[k].push_back(l);
    }
    if (options[k].empty()) options[k].push_back(t.done);
    space *= options[k].size();
    if (space > cap) {
      throw InstanceTooLargeError("oracle search space exceeds cap of " +
                                  std::to_string(cap));
    }
  }

  OracleResult best;
  best.depth.assign(n, 0);
  std::vector<std::size_t> odometer(n, 0);
  while (true) {
    double t = now;
    double reward = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < n && ok; ++k) {
      const PlanTask& task = tasks[order[k]];
      const int d = options[k][odometer[k]];
      if (d > task.done) {
        t += task.exec(task.done, d);
        ok = t <= task.deadline + kTimeEps;
      }
      reward += task.gain[static_cast<std::size_t>(d)];
    }
    if (ok) {
      ++best.examined;
      if (!best.feasible || reward > best.reward) {
        best.feasible = true;
        best.reward = reward;
        for (std::size_t k = 0; k < n; ++k) {
          best.depth[order[k]] = options[k][odometer[k]];
        }
      }
    }
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++odometer[k] < options[k].size()) break;
      odometer[k] = 0;
      if (k == 0) return best;
    }
    if (n == 0) return best;
  }
}

}  // namespace anytime
