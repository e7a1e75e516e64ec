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

// Trace libraries, request streams and stage-time profiling.
//
// Trace file format (UTF-8, one record per line):
//
//   #stages=3 classes=10 wcet=0.005,0.005,0.005
//   0.61,1;0.83,1;0.91,1
//   0.32,0;0.58,0;0.80,1
//
// Each record lists `confidence,correct` per stage, separated by ';'. Blank
// lines are ignored.

#ifndef ANYTIME_WORKLOAD_HPP_
#define ANYTIME_WORKLOAD_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "anytime/task_model.hpp"

namespace anytime {

struct TraceRecord {
  std::vector<double> confidence;
  std::vector<bool> correct;
};

struct TraceLibrary {
  int num_classes = 10;
  int num_stages = 0;
  std::vector<double> stage_wcet;
  std::vector<TraceRecord> records;

  /// Stage profiles of one record, combining the header wcets with the
  /// record's confidences.
  std::vector<StageProfile> stages(std::size_t record) const;
};

/// std::invalid_argument on any broken invariant.
void validate(const TraceLibrary& library);

/// std::runtime_error with a line number on malformed input.
TraceLibrary read_trace(std::istream& in);
TraceLibrary load_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const TraceLibrary& library);
void save_trace(const std::filesystem::path& path, const TraceLibrary& library);

enum class ArrivalMode {
  kClosedLoop,  // a client issues its next request when the previous retires
  kPoisson,     // open loop, exponential inter-arrival times
};

std::string_view to_string(ArrivalMode mode);
ArrivalMode parse_arrival_mode(std::string_view name);

struct WorkloadSpec {
  int clients = 20;
  double d_lower = 0.01;
  double d_upper = 0.3;
  std::size_t requests = 2000;
  std::uint64_t seed = 1;
  ArrivalMode arrival = ArrivalMode::kClosedLoop;
  double poisson_rate = 100.0;  // requests per second, kPoisson only
  int mandatory = 1;
};

void validate(const WorkloadSpec& spec);

struct Request {
  Job job;
  int client = 0;
  std::size_t record = 0;
};

/// Requests in issue order. Under kClosedLoop only the first request of each
/// client has a meaningful arrival (0); the simulator times the rest.
struct Workload {
  ArrivalMode mode = ArrivalMode::kPoisson;
  std::vector<Request> requests;
};

/// Draws every relative deadline from U[d_lower, d_upper] and records from a
/// shuffled deck that is reshuffled once exhausted. Deterministic in the seed.
Workload generate(const WorkloadSpec& spec, const TraceLibrary& library);

/// Explicit job list as an open-loop workload (client = index).
Workload workload_from_jobs(std::vector<Job> jobs);

enum class CurveFamily {
  kSaturating,  // each stage closes a random share (mean one half) of the gap to 1
  kLinear,      // confidence rises by a fixed per-record step each stage
};

std::string_view to_string(CurveFamily family);
CurveFamily parse_curve_family(std::string_view name);

struct SynthOptions {
  int num_stages = 3;
  int num_classes = 10;
  std::size_t records = 1000;
  std::vector<double> stage_wcet;  // empty: 5 ms per stage
  CurveFamily family = CurveFamily::kSaturating;
  std::uint64_t seed = 1;
};

/// Synthetic trace library with per-record difficulty (easy records start
/// near 0.95, hard ones near 0.3). Correctness is coupled across stages
/// through one uniform draw per record, so a correct exit stays correct
/// deeper and P(correct at l) equals the confidence at l.
TraceLibrary synth_library(const SynthOptions& options);

enum class WcetBound {
  kMeanCi99,      // mean + 2.576 * sd / sqrt(n)
  kPercentile99,  // empirical 99th percentile (nearest rank)
};

std::string_view to_string(WcetBound bound);
WcetBound parse_wcet_bound(std::string_view name);

/// One worst-case time per stage from repeated timing samples. Each stage
/// needs at least two samples.
std::vector<double> profile_wcet(const std::vector<std::vector<double>>& samples,
                                 WcetBound bound = WcetBound::kMeanCi99);

/// Samples file: one line per stage, comma-separated durations in seconds.
/// Lines starting with '#' are comments.
std::vector<std::vector<double>> read_samples(std::istream& in);

}  // namespace anytime

#endif  // ANYTIME_WORKLOAD_HPP_
