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

#include "anytime/task_model.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace anytime {

void validate(const Job& job) {
  if (job.stages.empty()) {
    throw std::invalid_argument("job " + std::to_string(job.id) +
                                " has no stages");
  }
  for (const StageProfile& s : job.stages) {
    if (!(s.wcet > 0.0)) {
      throw std::invalid_argument("job " + std::to_string(job.id) +
                                  ": stage wcet must be positive");
    }
    if (!(s.confidence >= 0.0 && s.confidence <= 1.0)) {
      throw std::invalid_argument("job " + std::to_string(job.id) +
                                  ": confidence outside [0,1]");
    }
  }
  if (job.mandatory < 1 || job.mandatory > job.num_stages()) {
    throw std::invalid_argument("job " + std::to_string(job.id) +
                                ": mandatory depth outside [1, L]");
  }
}

double AdjustedJob::max_stage_wcet() const {
  double m = 0.0;
  for (const StageProfile& s : job.stages) m = std::max(m, s.wcet);
  return m;
}

AdjustedJob adjust_deadline(const Job& job, double cpu_overhead) {
  if (cpu_overhead < 0.0) {
    throw std::invalid_argument("cpu_overhead must be non-negative");
  }
  validate(job);
  AdjustedJob out;
  out.job = job;
  out.cum_exec.reserve(job.stages.size() + 1);
  out.cum_exec.push_back(0.0);
  for (const StageProfile& s : job.stages) {
    out.cum_exec.push_back(out.cum_exec.back() + s.wcet);
  }
  out.d_adj = job.raw_deadline() - cpu_overhead - out.max_stage_wcet();
  return out;
}

double cumulative_exec(const AdjustedJob& adjusted, int depth) {
  if (depth < 1 || depth > adjusted.num_stages()) {
    throw std::out_of_range("depth " + std::to_string(depth) +
                            " outside [1, " +
                            std::to_string(adjusted.num_stages()) + "]");
  }
  return adjusted.cum_exec[static_cast<std::size_t>(depth)];
}

}  // namespace anytime
