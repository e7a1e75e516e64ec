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

// Exhaustive depth assignment for small job sets. Used as ground truth for
// the planner; never on the simulation path.

#ifndef ANYTIME_ORACLE_HPP_
#define ANYTIME_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "anytime/depth_planner.hpp"

namespace anytime {

class InstanceTooLargeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct OracleResult {
  bool feasible = false;        // false only when mandatory parts cannot fit
  double reward = 0.0;          // unquantized sum of gains
  std::vector<int> depth;       // in the caller's task order
  std::uint64_t examined = 0;   // feasible assignments visited
};

inline constexpr std::uint64_t kDefaultOracleCap = 10'000'000;

/// Enumerates every depth vector (stopping included where `mode` permits),
/// checks EDF feasibility by prefix sums and returns the best. Ties keep the
/// first assignment in odometer order over deadline-sorted tasks.
OracleResult brute_force(std::span<const PlanTask> tasks, double now,
                         DropMode mode,
                         std::uint64_t cap = kDefaultOracleCap);

}  // namespace anytime

#endif  // ANYTIME_ORACLE_HPP_
