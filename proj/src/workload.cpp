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

#include "anytime/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "anytime/format.hpp"

namespace anytime {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw std::runtime_error("trace line " + std::to_string(line) + ": " + what);
}

double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    parse_error(line, "bad number '" + std::string(s) + "'");
  }
  return v;
}

int to_int(std::string_view s, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    parse_error(line, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::vector<StageProfile> TraceLibrary::stages(std::size_t record) const {
  const TraceRecord& rec = records.at(record);
  std::vector<StageProfile> out(static_cast<std::size_t>(num_stages));
  for (std::size_t l = 0; l < out.size(); ++l) {
    out[l] = {stage_wcet[l], rec.confidence[l], rec.correct[l]};
  }
  return out;
}

void validate(const TraceLibrary& library) {
  if (library.num_stages < 1) throw std::invalid_argument("trace needs stages");
  if (library.num_classes < 1) throw std::invalid_argument("trace needs classes");
  if (static_cast<int>(library.stage_wcet.size()) != library.num_stages) {
    throw std::invalid_argument("wcet list length != stage count");
  }
  for (double w : library.stage_wcet) {
    if (!(w > 0.0)) throw std::invalid_argument("stage wcet must be positive");
  }
  for (std::size_t i = 0; i < library.records.size(); ++i) {
    const TraceRecord& r = library.records[i];
    if (static_cast<int>(r.confidence.size()) != library.num_stages ||
        r.correct.size() != r.confidence.size()) {
      throw std::invalid_argument("record " + std::to_string(i) +
                                  " has the wrong number of stages");
    }
    for (double c : r.confidence) {
      if (!(c >= 0.0 && c <= 1.0)) {
        throw std::invalid_argument("record " + std::to_string(i) +
                                    ": confidence outside [0,1]");
      }
    }
  }
}

TraceLibrary read_trace(std::istream& in) {
  TraceLibrary lib;
  bool have_header = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (have_header) parse_error(line_no, "duplicate header");
      have_header = true;
      bool stages = false, classes = false, wcet = false;
      for (std::string_view field : split(line.substr(1), ' ')) {
        if (field.empty()) continue;
        const std::size_t eq = field.find('=');
        if (eq == std::string_view::npos) parse_error(line_no, "expected key=value");
        const std::string_view key = field.substr(0, eq);
        const std::string_view value = field.substr(eq + 1);
        if (key == "stages") {
          lib.num_stages = to_int(value, line_no);
          stages = true;
        } else if (key == "classes") {
          lib.num_classes = to_int(value, line_no);
          classes = true;
        } else if (key == "wcet") {
          for (std::string_view w : split(value, ',')) {
            lib.stage_wcet.push_back(to_double(w, line_no));
          }
          wcet = true;
        } else {
          parse_error(line_no, "unknown header key '" + std::string(key) + "'");
        }
      }
      if (!stages || !classes || !wcet) {
        parse_error(line_no, "header needs stages=, classes= and wcet=");
      }
      continue;
    }
    if (!have_header) parse_error(line_no, "record before header");
    TraceRecord rec;
    for (std::string_view stage : split(line, ';')) {
      const auto parts = split(stage, ',');
      if (parts.size() != 2) parse_error(line_no, "expected confidence,correct");
      rec.confidence.push_back(to_double(parts[0], line_no));
      const int ok = to_int(parts[1], line_no);
      if (ok != 0 && ok != 1) parse_error(line_no, "correct flag must be 0 or 1");
      rec.correct.push_back(ok == 1);
    }
    if (static_cast<int>(rec.confidence.size()) != lib.num_stages) {
      parse_error(line_no, "expected " + std::to_string(lib.num_stages) +
                               " stages, got " +
                               std::to_string(rec.confidence.size()));
    }
    lib.records.push_back(std::move(rec));
  }
  if (!have_header) throw std::runtime_error("trace has no header line");
  try {
    validate(lib);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid trace: ") + e.what());
  }
  return lib;
}

TraceLibrary load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace " + path.string());
  return read_trace(in);
}

void write_trace(std::ostream& out, const TraceLibrary& library) {
  validate(library);
  out << "#stages=" << library.num_stages << " classes=" << library.num_classes
      << " wcet=";
  for (std::size_t l = 0; l < library.stage_wcet.size(); ++l) {
    if (l) out << ',';
    out << format_double(library.stage_wcet[l]);
  }
  out << '\n';
  for (const TraceRecord& r : library.records) {
    for (std::size_t l = 0; l < r.confidence.size(); ++l) {
      if (l) out << ';';
      out << format_double(r.confidence[l]) << ',' << (r.correct[l] ? 1 : 0);
    }
    out << '\n';
  }
}

void save_trace(const std::filesystem::path& path, const TraceLibrary& library) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace " + path.string());
  write_trace(out, library);
}

std::string_view to_string(ArrivalMode mode) {
  return mode == ArrivalMode::kClosedLoop ? "closed" : "poisson";
}

ArrivalMode parse_arrival_mode(std::string_view name) {
  if (name == "closed") return ArrivalMode::kClosedLoop;
  if (name == "poisson") return ArrivalMode::kPoisson;
  throw std::invalid_argument("unknown arrival mode '" + std::string(name) + "'");
}

void validate(const WorkloadSpec& spec) {
  if (spec.clients < 1) throw std::invalid_argument("K must be at least 1");
  if (!(spec.d_lower > 0.0)) throw std::invalid_argument("D_l must be positive");
  if (!(spec.d_lower <= spec.d_upper)) {
    throw std::invalid_argument("D_l must not exceed D_u");
  }
  if (spec.arrival == ArrivalMode::kPoisson && !(spec.poisson_rate > 0.0)) {
    throw std::invalid_argument("poisson rate must be positive");
  }
  if (spec.mandatory < 1) throw std::invalid_argument("mandatory depth must be >= 1");
}

Workload generate(const WorkloadSpec& spec, const TraceLibrary& library) {
  validate(spec);
  if (library.records.empty()) throw std::invalid_argument("trace library is empty");
  if (spec.mandatory > library.num_stages) {
    throw std::invalid_argument("mandatory depth exceeds stage count");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> deadline(spec.d_lower, spec.d_upper);
  std::exponential_distribution<double> gap(spec.poisson_rate);

  std::vector<std::size_t> deck(library.records.size());
  std::size_t next = deck.size();

  Workload w;
  w.mode = spec.arrival;
  w.requests.reserve(spec.requests);
  double clock = 0.0;
  for (std::size_t j = 0; j < spec.requests; ++j) {
    if (next == deck.size()) {
      std::iota(deck.begin(), deck.end(), std::size_t{0});
      std::shuffle(deck.begin(), deck.end(), rng);
      next = 0;
    }
    Request r;
    r.record = deck[next++];
    r.client = static_cast<int>(j % static_cast<std::size_t>(spec.clients));
    r.job.id = j;
    r.job.rel_deadline =
        spec.d_lower == spec.d_upper ? spec.d_lower : deadline(rng);
    r.job.stages = library.stages(r.record);
    r.job.mandatory = spec.mandatory;
    if (spec.arrival == ArrivalMode::kPoisson) {
      clock += gap(rng);
      r.job.arrival = clock;
    }
    w.requests.push_back(std::move(r));
  }
  return w;
}

Workload workload_from_jobs(std::vector<Job> jobs) {
  Workload w;
  w.mode = ArrivalMode::kPoisson;
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.arrival < b.arrival;
  });
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    w.requests.push_back({std::move(jobs[i]), static_cast<int>(i), i});
  }
  return w;
}

std::string_view to_string(CurveFamily family) {
  return family == CurveFamily::kSaturating ? "saturating" : "linear";
}

CurveFamily parse_curve_family(std::string_view name) {
  if (name == "saturating") return CurveFamily::kSaturating;
  if (name == "linear") return CurveFamily::kLinear;
  throw std::invalid_argument("unknown curve family '" + std::string(name) + "'");
}

TraceLibrary synth_library(const SynthOptions& options) {
  if (options.num_stages < 1 || options.num_classes < 1 || options.records < 1) {
    throw std::invalid_argument("synth_library parameters must be positive");
  }
  TraceLibrary lib;
  lib.num_stages = options.num_stages;
  lib.num_classes = options.num_classes;
  lib.stage_wcet = options.stage_wcet;
  if (lib.stage_wcet.empty()) {
    lib.stage_wcet.assign(static_cast<std::size_t>(options.num_stages), 0.005);
  }

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto stages = static_cast<std::size_t>(options.num_stages);
  lib.records.reserve(options.records);
  for (std::size_t i = 0; i < options.records; ++i) {
    const double difficulty = unit(rng);
    TraceRecord rec;
    rec.confidence.resize(stages);
    rec.correct.resize(stages);
    double c = 0.95 - 0.65 * difficulty;
    const double step = (1.0 - c) * (0.2 + 0.2 * unit(rng));
    for (std::size_t l = 0; l < stages; ++l) {
      if (l > 0) {
        if (options.family == CurveFamily::kSaturating) {
          c = 1.0 - (1.0 - c) * (0.3 + 0.4 * unit(rng));
        } else {
          c = std::min(1.0, c + step);
        }
      }
      rec.confidence[l] = std::clamp(c, 0.0, 1.0);
    }
    const double u = unit(rng);
    for (std::size_t l = 0; l < stages; ++l) {
      rec.correct[l] = u < rec.confidence[l];
    }
    lib.records.push_back(std::move(rec));
  }
  return lib;
}

std::string_view to_string(WcetBound bound) {
  return bound == WcetBound::kMeanCi99 ? "ci99" : "p99";
}

WcetBound parse_wcet_bound(std::string_view name) {
  if (name == "ci99") return WcetBound::kMeanCi99;
  if (name == "p99") return WcetBound::kPercentile99;
  throw std::invalid_argument("unknown wcet bound '" + std::string(name) + "'");
}

std::vector<double> profile_wcet(const std::vector<std::vector<double>>& samples,
                                 WcetBound bound) {
  constexpr double kZ995 = 2.576;
  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const std::vector<double>& xs = samples[s];
    if (xs.size() < 2) {
      throw std::invalid_argument("stage " + std::to_string(s + 1) +
                                  " needs at least two timing samples");
    }
    const double n = static_cast<double>(xs.size());
    if (bound == WcetBound::kPercentile99) {
      std::vector<double> sorted = xs;
      std::sort(sorted.begin(), sorted.end());
      const auto rank = static_cast<std::size_t>(std::ceil(0.99 * n));
      out.push_back(sorted[std::max<std::size_t>(rank, 1) - 1]);
      continue;
    }
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    out.push_back(mean + kZ995 * sd / std::sqrt(n));
  }
  return out;
}

std::vector<std::vector<double>> read_samples(std::istream& in) {
  std::vector<std::vector<double>> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> stage;
    for (std::string_view v : split(line, ',')) {
      if (v.empty()) continue;
      stage.push_back(to_double(v, line_no));
    }
    out.push_back(std::move(stage));
  }
  return out;
}

}  // namespace anytime
